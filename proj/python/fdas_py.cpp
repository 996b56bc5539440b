#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fdas/convolution.hpp"
#include "fdas/fop_prep.hpp"
#include "fdas/harmonic.hpp"
#include "fdas/pipeline_model.hpp"
#include "fdas/run.hpp"

namespace py = pybind11;
using namespace fdas;

namespace {

using CArray = py::array_t<std::complex<float>, py::array::c_style | py::array::forcecast>;
using FArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

std::vector<cfloat> to_vec(const CArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D complex array");
  return {a.data(), a.data() + a.size()};
}

FArray to_array(const Fop& f) {
  FArray out({f.rows(), f.cols()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Fop to_fop(const FArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D float array (templates x channels)");
  return Fop(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
             std::vector<float>(a.data(), a.data() + a.size()));
}

ConvStrategy conv_of(const std::string& name, std::size_t param) { return parse_conv_strategy(name, param); }

py::list candidates_of(const CandidateList& l) {
  py::list out;
  for (const auto& c : l.entries) out.append(py::make_tuple(c.harmonic, c.template_index, c.channel, c.power));
  return out;
}

}  // namespace

PYBIND11_MODULE(_fdas, m) {
  m.doc() = "Fourier domain acceleration search pipeline";

  m.def(
      "fir",
      [](const CArray& x, const CArray& h, const std::string& strategy, std::size_t param) {
        const auto xv = to_vec(x), hv = to_vec(h);
        FilterBank bank;
        bank.templates = {hv};
        const ConvStrategy s = conv_of(strategy, param);
        validate(s, hv.size());
        ComplexSeries y;
        if (std::holds_alternative<NaiveTd>(s)) y = fir_naive_td(xv, hv);
        else if (auto* o = std::get_if<OlaTd>(&s)) y = fir_ola_td(xv, hv, o->n_paral).y;
        else if (std::holds_alternative<NaiveFd>(s)) y = fir_naive_fd(xv, hv);
        else y = fir_ols_fd(xv, hv, std::get<OlsFd>(s).chunk).y;
        return py::array_t<std::complex<float>>(static_cast<py::ssize_t>(y.size()), y.data.data());
      },
      py::arg("x"), py::arg("h"), py::arg("strategy") = "naive-td", py::arg("param") = 0,
      "Filter x with h; strategy is naive-td, ola-td, naive-fd or ols-fd.");

  m.def(
      "template_bank",
      [](std::uint32_t n_temp, std::uint32_t n_tap) {
        py::list out;
        for (const auto& h : make_template_bank(n_temp, n_tap).templates) {
          out.append(py::array_t<std::complex<float>>(static_cast<py::ssize_t>(h.size()), h.data()));
        }
        return out;
      },
      py::arg("n_temp"), py::arg("n_tap"));

  m.def(
      "fop",
      [](const CArray& x, std::uint32_t n_temp, std::uint32_t n_tap, const std::string& strategy, std::size_t param,
         std::size_t threads) {
        const auto xv = to_vec(x);
        const auto bank = make_template_bank(n_temp, n_tap);
        ConvOptions o;
        o.threads = threads;
        auto out = convolve_bank(xv, bank, conv_of(strategy, param), o);
        if (auto* raw = std::get_if<RawPower>(&out.plane)) return to_array(discard(*raw));
        return to_array(std::get<Fop>(out.plane));
      },
      py::arg("x"), py::arg("n_temp"), py::arg("n_tap"), py::arg("strategy") = "ols-fd", py::arg("param") = 0,
      py::arg("threads") = 1, "Filter-output plane of the built-in template bank, templates x channels.");

  m.def(
      "harmonic_sum",
      [](const FArray& plane, const std::vector<double>& thresholds, const std::string& strategy, std::size_t n_cand,
         std::size_t threads) {
        const Fop f = to_fop(plane);
        const HarmonicStrategy s = parse_harmonic_strategy(strategy, 0, 0);
        HarmonicParams p;
        p.n_hp = thresholds.size();
        p.n_cand = n_cand;
        p.threads = threads;
        const auto table = ThresholdTable::constant(thresholds, f.rows());
        const auto prepared = prepare(f, NaiveTd{}, s, p.n_hp);
        return candidates_of(harmonic_sum(prepared, s, table, p).candidates);
      },
      py::arg("plane"), py::arg("thresholds"), py::arg("strategy") = "naive-multi", py::arg("n_cand") = 200,
      py::arg("threads") = 1,
      "Candidates (harmonic, template, channel, power); one threshold per harmonic plane.");

  m.def("total_latency", [](double ft, double fop, double hm) { return total_latency(StageTiming::lumped(ft, fop, hm)); });
  m.def("choose_buffering",
        [](double ft, double fop, double hm) { return choose_buffering(StageTiming::lumped(ft, fop, hm)); });
  m.def("ideal_period", [](double ft, double fop, double hm, int buffering) {
    return ideal_period(StageTiming::lumped(ft, fop, hm), buffering);
  });
  m.def(
      "multi_device_period",
      [](double ft, double fop, double hm, std::size_t n, const std::string& scheme) {
        return multi_device_period(StageTiming::lumped(ft, fop, hm), n, parse_scheme(scheme));
      },
      py::arg("ft"), py::arg("fop"), py::arg("hm"), py::arg("n"), py::arg("scheme") = "multi-input");

  m.def(
      "run",
      [](const std::string& conv, const std::string& hm, std::size_t n_chan, std::vector<std::tuple<std::size_t, std::uint32_t, float>> inject,
         double noise, std::uint64_t seed, std::size_t threads) {
        RunSpec spec;
        spec.config.n_chan = static_cast<std::uint32_t>(n_chan);
        spec.conv = conv_of(conv, 0);
        spec.hm = parse_harmonic_strategy(hm, 0, 0);
        for (const auto& [ch, harm, amp] : inject) spec.injections.push_back({ch, harm, amp});
        spec.noise_sigma = noise;
        spec.seed = seed;
        spec.threads = threads;
        const RunResult r = run_combination(spec);
        py::dict out;
        out["combination"] = combination_name(spec);
        out["fop"] = to_array(r.fop);
        out["candidates"] = candidates_of(r.candidates);
        out["t_ft"] = r.timing.t_ft();
        out["t_fop"] = r.timing.t_fop();
        out["t_hm"] = r.timing.t_hm;
        out["buffering"] = r.plan.buffering;
        out["period"] = r.plan.period;
        return out;
      },
      py::arg("conv") = "ols-fd", py::arg("hm") = "naive-multi", py::arg("n_chan") = 4096,
      py::arg("inject") = std::vector<std::tuple<std::size_t, std::uint32_t, float>>{}, py::arg("noise") = 1.0,
      py::arg("seed") = 1, py::arg("threads") = 1, "One end-to-end run at desk scale.");
}
