#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fdas/pipeline_model.hpp"
#include "support/contention_oracle.hpp"

using namespace fdas;

namespace {

DeviceModel unit_bus() {
  DeviceModel d;
  d.global_memory_bandwidth = 1.0;
  return d;
}

// FT dominates and overlaps discard, then transpose, then harmonic summing.
StageTiming overlap_case() {
  StageTiming st;
  st.ft_launch.assign(21, 12.0);
  st.prep = {true, true, false};
  st.t_discard = 100.0;
  st.t_transpose = 40.0;
  st.t_hm = 100.0;
  st.demand = {0.5, 0.7, 1.0, 0.0, 0.0, 0.4};
  return st;
}

}  // namespace

TEST_CASE("total latency adds the three stages exactly") {
  CHECK(total_latency(StageTiming::lumped(347, 560, 122)) == 1029.0);
  CHECK(total_latency(StageTiming::lumped(190, 633, 149)) == 972.0);
  CHECK(total_latency(StageTiming::lumped(0, 0, 0)) == 0.0);
  StageTiming st;
  st.ft_launch = {1.5, 2.5};
  st.t_klo = 0.25;
  st.prep = {true, false, true};
  st.t_discard = 3;
  st.t_transpose = 100;  // not selected
  st.t_reorder = 4;
  st.t_hm = 1;
  CHECK(st.t_ft() == 4.5);
  CHECK(st.t_fop() == 7.0);
  CHECK(total_latency(st) == 12.5);
}

TEST_CASE("buffering choice") {
  CHECK(choose_buffering(StageTiming::lumped(1, 1, 1)) == 3);
  CHECK(choose_buffering(StageTiming::lumped(3, 1, 1)) == 2);
  CHECK(choose_buffering(StageTiming::lumped(190, 633, 149)) == 2);
  CHECK(choose_buffering(StageTiming::lumped(2, 1, 1)) == 2);  // max == t_fdas / 2
}

TEST_CASE("ideal period") {
  const auto even = StageTiming::lumped(1, 1, 1);
  CHECK(ideal_period(even, 3) == 1.0);
  CHECK(ideal_period(even, 2) == 2.0);
  CHECK(ideal_period(even, 1) == 3.0);
  CHECK_THROWS_AS(ideal_period(even, 4), std::invalid_argument);
}

TEST_CASE("period bounds hold for random timings") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const auto st = StageTiming::lumped(u(rng), u(rng), u(rng));
    const double t = total_latency(st);
    for (int b : {1, 2, 3}) {
      const double p = ideal_period(st, b);
      CHECK(p <= t);
      CHECK(p >= t / b * (1 - 1e-12));
    }
  }
}

TEST_CASE("no contention leaves the ideal period") {
  auto st = StageTiming::lumped(3, 1, 1);
  st.demand = {0.2, 0, 0, 0, 0.2, 0.2};
  CHECK(contended_period(st, unit_bus(), 2) == ideal_period(st, 2));
  CHECK(contended_period(st, unit_bus(), 3) == ideal_period(st, 3));
  CHECK(contended_period(st, unit_bus(), 1) == total_latency(st));
}

TEST_CASE("two full-bandwidth stages share the bus") {
  auto st = StageTiming::lumped(2, 2, 0);
  st.demand.ft = 1.0;
  st.demand.fop = 1.0;
  CHECK(ideal_period(st, 3) == 2.0);
  CHECK(contended_period(st, unit_bus(), 3) == doctest::Approx(4.0));
}

TEST_CASE("proportional stretch when the sum exceeds the bus") {
  auto st = StageTiming::lumped(10, 10, 10);
  st.demand = {0.5, 0, 0, 0, 0.5, 0.5};
  // all three at 2/3 speed
  CHECK(contended_period(st, unit_bus(), 3) == doctest::Approx(15.0));
}

TEST_CASE("contention never shortens a period") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 10.0), d(0.0, 1.5);
  for (int i = 0; i < 300; ++i) {
    StageTiming st;
    st.ft_launch.assign(1 + i % 5, u(rng));
    st.prep = {true, i % 2 == 0, i % 3 == 0};
    st.t_discard = u(rng);
    st.t_transpose = u(rng);
    st.t_reorder = u(rng);
    st.t_hm = u(rng);
    st.demand = {d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    for (int b : {2, 3}) CHECK(contended_period(st, unit_bus(), b) >= ideal_period(st, b));
  }
}

TEST_CASE("overlap case: discard stretches launches, transpose stalls one") {
  const StageTiming st = overlap_case();
  REQUIRE(choose_buffering(st) == 2);
  const auto trace = contention_trace(st, unit_bus(), 2);
  for (int i = 0; i < 8; ++i) CHECK(trace.ft_launch_span[i] == doctest::Approx(14.4));
  CHECK(trace.ft_launch_span[8] == doctest::Approx(52.8));
  for (int i = 9; i < 21; ++i) CHECK(trace.ft_launch_span[i] == doctest::Approx(12.0));
  CHECK(trace.period == doctest::Approx(312.0));
  CHECK(ideal_period(st, 2) == 252.0);

  const auto sim = oracle::simulate_contention(st, 1.0, 2);
  CHECK(std::abs(sim.period - trace.period) / trace.period < 0.01);
}

TEST_CASE("contention matches the stepped simulation on random cases") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 10.0), d(0.0, 1.3);
  for (int i = 0; i < 25; ++i) {
    StageTiming st;
    st.ft_launch.assign(1 + i % 6, u(rng));
    st.t_klo = i % 2 ? 0.3 : 0.0;
    st.prep = {true, i % 2 == 1, i % 4 == 0};
    st.t_discard = u(rng);
    st.t_transpose = u(rng);
    st.t_reorder = u(rng);
    st.t_hm = u(rng) * 3;
    st.demand = {d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    for (int b : {2, 3}) {
      const double model = contended_period(st, unit_bus(), b);
      const auto sim = oracle::simulate_contention(st, 1.0, b, 100000);
      CHECK(std::abs(std::max(sim.period, ideal_period(st, b)) - model) / model < 0.01);
    }
  }
}

TEST_CASE("multiple devices") {
  const auto st = StageTiming::lumped(100, 50, 600);
  CHECK(multi_device_period(st, 3, Scheme::single_input) == 200.0);
  CHECK(multi_device_period(st, 3, Scheme::multi_input) == 200.0);
  for (Scheme s : {Scheme::single_input, Scheme::multi_input, Scheme::multi_config}) {
    CHECK(multi_device_period(st, 1, s) == 600.0);
  }
  CHECK_THROWS_AS(multi_device_period(st, 0, Scheme::multi_input), std::invalid_argument);

  auto h = StageTiming::lumped(100, 50, 600);
  h.fop_bytes = 7.88e9;  // one second over the default host link
  CHECK(multi_device_period(h, 2, Scheme::multi_config) == doctest::Approx(601.0));
  CHECK(multi_device_period(h, 3, Scheme::multi_config) == doctest::Approx(602.0));
  CHECK(multi_device_period(h, 3, Scheme::multi_config, {}, 1e-3) == doctest::Approx(2600.0));

  const auto naive_multi = StageTiming::lumped(143, 143, 570);
  CHECK(multi_device_period(naive_multi, 3, Scheme::multi_input) == 190.0);
}

TEST_CASE("multi-input never loses to single-input") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1e-3, 1e3);
  for (int i = 0; i < 5000; ++i) {
    const auto st = StageTiming::lumped(u(rng), u(rng), u(rng));
    for (std::size_t n : {2u, 3u, 4u}) {
      CHECK(multi_device_period(st, n, Scheme::multi_input) <= multi_device_period(st, n, Scheme::single_input));
    }
  }
}

TEST_CASE("plan degrades buffering for capacity and reports it") {
  auto st = StageTiming::lumped(1, 1, 1);
  DeviceModel dev;
  dev.off_chip_capacity = 100;
  st.fop_bytes = 40;
  auto p = plan(st, dev, 1, Scheme::single_input);
  CHECK(p.buffering == 2);
  CHECK(p.degraded);
  CHECK(p.period == 2.0);
  CHECK_FALSE(p.notes.empty());

  st.fop_bytes = 20;
  p = plan(st, dev, 1, Scheme::single_input);
  CHECK(p.buffering == 3);
  CHECK_FALSE(p.degraded);
  CHECK(p.period == 1.0);
  CHECK(p.period <= p.t_fdas);
}

TEST_CASE("plan rejects reconfiguration beyond t_limit") {
  const auto st = StageTiming::lumped(1, 1, 1);
  CHECK_FALSE(plan(st, {}, 1, Scheme::single_input, 0.27).reconfiguration_allowed);
  CHECK(plan(st, {}, 1, Scheme::single_input, 5.0).reconfiguration_allowed);
  CHECK(plan(st, {}, 1, Scheme::single_input).reconfiguration_allowed);
}

TEST_CASE("plan falls back to serial when contention outweighs overlap") {
  auto st = StageTiming::lumped(1, 1, 1);
  st.demand = {1, 0, 0, 0, 1, 1};
  const auto p = plan(st, unit_bus(), 1, Scheme::single_input);
  CHECK(p.period <= p.t_fdas);
}

TEST_CASE("sweep ranks rows and is deterministic") {
  TimingSet set;
  set.unit = "ms";
  set.combinations = {{"b", StageTiming::lumped(2, 2, 2)},
                      {"a", StageTiming::lumped(1, 1, 1)},
                      {"c", StageTiming::lumped(2, 2, 2)},
                      {"a2", StageTiming::lumped(1, 1, 1)}};
  const auto r = sweep(set, {}, 3, 4);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].combination == "a");
  CHECK(r.rows[1].combination == "a2");
  CHECK(r.rows[2].combination == "b");
  CHECK(r.rows[0].buffering == 3);
  CHECK(r.rows[0].period_contended == 1.0);
  CHECK(r.rows[0].period_multi_input == doctest::Approx(1.0 / 3));
  CHECK(report_to_json(r) == report_to_json(sweep(set, {}, 3, 1)));
  CHECK(report_to_csv(r).find("rank,combination") == 0);

  TimingSet empty;
  CHECK_THROWS_AS(sweep(empty, {}, 1), std::invalid_argument);
}

TEST_CASE("device and scheme validation") {
  DeviceModel d;
  d.host_link_bandwidth = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS_AS(contended_period(StageTiming::lumped(1, 1, 1), d, 2), std::invalid_argument);
  CHECK(parse_scheme("multi-config") == Scheme::multi_config);
  CHECK_THROWS_AS(parse_scheme("all"), std::invalid_argument);
}
