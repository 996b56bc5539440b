import numpy as np
import pytest

import fdas


def direct_fir(x, h):
    return np.convolve(x.astype(np.complex128), h.astype(np.complex128))[: len(x)]


@pytest.mark.parametrize("strategy,param", [("naive-td", 0), ("ola-td", 32), ("naive-fd", 0), ("ols-fd", 1024)])
def test_fir_matches_numpy(strategy, param):
    rng = np.random.default_rng(1)
    x = (rng.standard_normal(4096) + 1j * rng.standard_normal(4096)).astype(np.complex64)
    h = (rng.standard_normal(101) + 1j * rng.standard_normal(101)).astype(np.complex64)
    ref = direct_fir(x, h)
    got = fdas.fir(x, h, strategy, param)
    assert got.shape == x.shape
    assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-4


def test_fop_is_power_of_each_template():
    rng = np.random.default_rng(2)
    x = (rng.standard_normal(2048) + 1j * rng.standard_normal(2048)).astype(np.complex64)
    bank = fdas.template_bank(9, 33)
    plane = fdas.fop(x, 9, 33, "ols-fd", 512, threads=2)
    assert plane.shape == (9, 2048)
    for row, h in enumerate(bank):
        ref = np.abs(direct_fir(x, h)) ** 2
        assert np.max(np.abs(plane[row] - ref)) / np.max(ref) < 1e-4


def brute_force(plane, thresholds, n_cand):
    rows, cols = plane.shape
    half = rows // 2
    hp = np.zeros_like(plane, dtype=np.float32)
    out = []
    for k in range(1, len(thresholds) + 1):
        for r in range(rows):
            i = r - half
            src = half + int(i / k)  # truncation toward zero
            hp[r] += plane[src, np.arange(cols) // k]
        hits = [(-float(hp[r, j]), j, r - half) for r in range(rows) for j in range(cols) if hp[r, j] > thresholds[k - 1]]
        hits.sort()
        out += [(k, t, j, -p) for p, j, t in hits[:n_cand]]
    return out


@pytest.mark.parametrize("strategy", ["single", "naive-multi", "multi-n", "multi-r"])
def test_harmonic_sum_matches_brute_force(strategy):
    rng = np.random.default_rng(3)
    plane = rng.exponential(1.0, size=(7, 300)).astype(np.float32)
    thresholds = [2.5 * (k + 1) for k in range(8)]
    got = fdas.harmonic_sum(plane, thresholds, strategy, n_cand=30)
    want = brute_force(plane, thresholds, 30)
    assert [(k, t, j) for k, t, j, _ in got] == [(k, t, j) for k, t, j, _ in want]
    assert np.allclose([p for *_, p in got], [p for *_, p in want], rtol=0, atol=0)


def test_pipeline_model():
    assert fdas.total_latency(347, 560, 122) == 1029
    assert fdas.total_latency(190, 633, 149) == 972
    assert fdas.choose_buffering(1, 1, 1) == 3
    assert fdas.choose_buffering(190, 633, 149) == 2
    assert fdas.ideal_period(190, 633, 149, 2) == 633
    assert fdas.multi_device_period(143, 143, 570, 3, "multi-input") == 190


def test_run_recovers_injected_tone():
    r = fdas.run("ols-fd", "multi-r", inject=[(1000, 4, 6.0)], noise=0.0)
    assert r["combination"] == "aols-2048+multi-r-16x4"
    assert r["fop"].shape == (9, 4096)
    assert (4, 0, 1000) in [(k, t, j) for k, t, j, _ in r["candidates"]]
    assert r["period"] <= r["t_ft"] + r["t_fop"] + r["t_hm"]


def test_errors_raise():
    with pytest.raises(ValueError):
        fdas.fir(np.ones(8, np.complex64), np.ones(3, np.complex64), "fft")
    with pytest.raises(ValueError):
        fdas.harmonic_sum(np.ones((4, 10), np.float32), [1.0])
