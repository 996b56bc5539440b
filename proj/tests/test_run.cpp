#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdas/run.hpp"
#include "support/oracles.hpp"
#include "support/recovery.hpp"

using namespace fdas;

namespace {

RunSpec small_spec() {
  RunSpec s;
  s.config.n_chan = 1u << 11;
  s.config.n_temp = 9;
  s.config.n_tap = 33;
  return s;
}

}  // namespace

TEST_CASE("combination names") {
  RunSpec s;
  s.conv = OlsFd{2048, 1};
  s.hm = MultipleHpR{16, 4};
  s.prep = PrepSite::host;
  CHECK(combination_name(s) == "aols-2048+multi-r-16x4/host");
  s.conv = NaiveTd{};
  s.hm = NaiveMultipleHp{};
  CHECK(combination_name(s) == "naive-td+naive-multi");
}

TEST_CASE("spec validation") {
  RunSpec s = small_spec();
  CHECK_NOTHROW(validate(s));
  s.prep = std::nullopt;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);  // ols needs discard
  s.conv = NaiveTd{};
  CHECK_NOTHROW(validate(s));
  s.hm = MultipleHpN{1};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.n_devices = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.injections = {{1u << 11, 1, 1.0f}};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.conv = OlsFd{16, 1};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("families cover both convolution kinds and every summing method") {
  const auto specs = combination_families(RunSpec{});
  CHECK(specs.size() == 10);
  for (const auto& s : specs) CHECK_NOTHROW(validate(s));
}

TEST_CASE("zero-noise tone is recovered by every combination") {
  RunSpec base = small_spec();
  base.noise_sigma = 0.0;
  const Injection tone{700, 4, 5.0f};
  base.injections = {tone};
  for (const auto& spec : oracle::all_combinations(base)) {
    CAPTURE(combination_name(spec));
    const RunResult r = run_combination(spec);
    CHECK(oracle::recovered(r.candidates, tone));
    CHECK(r.plan.period <= r.plan.t_fdas);
    CHECK(r.timing.t_hm > 0.0);
    CHECK(r.rfop.has_value() == std::holds_alternative<MultipleHpR>(spec.hm));
  }
}

TEST_CASE("all combinations produce the same plane") {
  RunSpec base = small_spec();
  base.injections = {{333, 2, 6.0f}};
  const auto specs = oracle::all_combinations(base);
  const auto ref = run_combination(specs.front());
  for (const auto& spec : specs) {
    CAPTURE(combination_name(spec));
    const auto r = run_combination(spec);
    CHECK(oracle::row_relative_error(ref.fop, r.fop) < 1e-4);
  }
}

TEST_CASE("results are bit identical across thread counts") {
  RunSpec base = small_spec();
  base.injections = {{900, 3, 4.0f}};
  for (auto spec : combination_families(base)) {
    CAPTURE(combination_name(spec));
    spec.threads = 1;
    const auto a = run_combination(spec);
    for (std::size_t t : {2u, 8u}) {
      spec.threads = t;
      const auto b = run_combination(spec);
      CHECK(oracle::fop_bytes(a.fop) == oracle::fop_bytes(b.fop));
      CHECK(oracle::candidate_bytes(a.candidates) == oracle::candidate_bytes(b.candidates));
    }
  }
}

TEST_CASE("input shape checks") {
  const RunSpec s = small_spec();
  const auto bank = make_template_bank(9, 33);
  CHECK_THROWS_AS(run_combination(s, ComplexSeries(100), bank), std::invalid_argument);
  CHECK_THROWS_AS(run_combination(s, ComplexSeries(s.config.n_chan), make_template_bank(5, 33)),
                  std::invalid_argument);
}

TEST_CASE("measured timing is positive and consistent") {
  RunSpec s = small_spec();
  s.hm = MultipleHpR{16, 4};
  const StageTiming t = measure_timing(s, 3);
  CHECK(t.t_ft() > 0.0);
  CHECK(t.t_fop() > 0.0);
  CHECK(t.t_hm > 0.0);
  CHECK(t.prep == PrepFlags{true, true, true});
  CHECK(t.fop_bytes > 0.0);
  CHECK_NOTHROW(t.validate());
}
