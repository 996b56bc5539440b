#include "fdas/pipeline_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fdas/parallel.hpp"

namespace fdas {

void DeviceModel::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("device field '") + name + "' must be > 0");
  };
  check(global_memory_bandwidth, "global_memory_bandwidth");
  check(off_chip_capacity, "off_chip_capacity");
  check(host_link_bandwidth, "host_link_bandwidth");
  check(reconfig_time, "reconfig_time");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::single_input: return "single-input";
    case Scheme::multi_input: return "multi-input";
    case Scheme::multi_config: return "multi-config";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "single-input") return Scheme::single_input;
  if (name == "multi-input") return Scheme::multi_input;
  if (name == "multi-config") return Scheme::multi_config;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

double total_latency(const StageTiming& st) { return st.t_ft() + st.t_fop() + st.t_hm; }

double max_stage(const StageTiming& st) { return std::max({st.t_ft(), st.t_fop(), st.t_hm}); }

int choose_buffering(const StageTiming& st) { return max_stage(st) < total_latency(st) / 2.0 ? 3 : 2; }

double ideal_period(const StageTiming& st, int buffering) {
  const double t = total_latency(st);
  const double m = max_stage(st);
  switch (buffering) {
    case 1: return t;
    case 2: return std::max(m, t - m);
    case 3: return m;
    default: throw std::invalid_argument("buffering must be 1, 2 or 3");
  }
}

// ---------------------------------------------------------------------------
// contention

namespace {

enum class Stage { ft, fop, hm };

struct Phase {
  double work;
  double demand;
  Stage stage;
  std::ptrdiff_t launch;  // FT launch index, -1 otherwise
};

std::vector<Phase> stage_phases(const StageTiming& st, Stage s) {
  std::vector<Phase> out;
  switch (s) {
    case Stage::ft:
      for (std::size_t i = 0; i < st.ft_launch.size(); ++i) {
        out.push_back({st.t_klo, 0.0, s, -1});
        out.push_back({st.ft_launch[i], st.demand.ft, s, static_cast<std::ptrdiff_t>(i)});
      }
      break;
    case Stage::fop:
      if (st.prep.discard) out.push_back({st.t_discard, st.demand.discard, s, -1});
      if (st.prep.transpose) out.push_back({st.t_transpose, st.demand.transpose, s, -1});
      if (st.prep.reorder) out.push_back({st.t_reorder, st.demand.reorder, s, -1});
      if (st.t_fop_unsplit > 0.0) out.push_back({st.t_fop_unsplit, st.demand.fop, s, -1});
      break;
    case Stage::hm:
      out.push_back({st.t_hm, st.demand.hm, s, -1});
      break;
  }
  return out;
}

std::vector<std::vector<Phase>> lanes_for(const StageTiming& st, int buffering) {
  const double t[3] = {st.t_ft(), st.t_fop(), st.t_hm};
  const Stage order[3] = {Stage::ft, Stage::fop, Stage::hm};
  std::vector<std::vector<Phase>> lanes;
  if (buffering == 3) {
    for (Stage s : order) lanes.push_back(stage_phases(st, s));
    return lanes;
  }
  const std::size_t top = static_cast<std::size_t>(std::max_element(t, t + 3) - t);
  lanes.push_back(stage_phases(st, order[top]));
  lanes.emplace_back();
  for (std::size_t s = 0; s < 3; ++s) {
    if (s == top) continue;
    auto p = stage_phases(st, order[s]);
    lanes.back().insert(lanes.back().end(), p.begin(), p.end());
  }
  return lanes;
}

std::vector<double> phase_rates(const std::vector<const Phase*>& active, double bandwidth) {
  std::vector<double> rate(active.size(), 1.0);
  std::size_t saturating = 0;
  double total = 0.0;
  for (const Phase* p : active) {
    if (p->demand >= bandwidth) ++saturating;
    total += p->demand;
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    const double d = active[i]->demand;
    if (d <= 0.0) continue;
    if (saturating > 0) {
      rate[i] = d >= bandwidth ? 1.0 / static_cast<double>(saturating) : 0.0;
    } else if (total > bandwidth) {
      rate[i] = bandwidth / total;
    }
  }
  return rate;
}

}  // namespace

ContentionTrace contention_trace(const StageTiming& st, const DeviceModel& dev, int buffering) {
  st.validate();
  dev.validate();
  ContentionTrace trace;
  trace.ft_launch_span.assign(st.ft_launch.size(), 0.0);

  if (buffering == 1) {
    trace.period = total_latency(st);
    trace.ft_launch_span = st.ft_launch;
    trace.fop_span = st.t_fop();
    trace.hm_span = st.t_hm;
    return trace;
  }
  if (buffering != 2 && buffering != 3) throw std::invalid_argument("buffering must be 1, 2 or 3");

  const auto lanes = lanes_for(st, buffering);
  const std::size_t n = lanes.size();
  std::vector<std::size_t> next(n, 0);
  std::vector<bool> running(n, false);
  std::vector<double> remaining(n, 0.0), started(n, 0.0), stage_start(3, -1.0), stage_end(3, 0.0);
  double now = 0.0;

  auto finish_phase = [&](std::size_t l) {
    const Phase& p = lanes[l][next[l]];
    if (p.launch >= 0) trace.ft_launch_span[static_cast<std::size_t>(p.launch)] = now - started[l];
    stage_end[static_cast<std::size_t>(p.stage)] = now;
    running[l] = false;
    ++next[l];
  };
  auto begin_phases = [&]() {
    for (std::size_t l = 0; l < n; ++l) {
      while (!running[l] && next[l] < lanes[l].size()) {
        const Phase& p = lanes[l][next[l]];
        auto& s0 = stage_start[static_cast<std::size_t>(p.stage)];
        if (s0 < 0.0) s0 = now;
        if (p.work > 0.0) {
          remaining[l] = p.work;
          started[l] = now;
          running[l] = true;
          break;
        }
        started[l] = now;
        finish_phase(l);
      }
    }
  };

  begin_phases();
  for (;;) {
    std::vector<std::size_t> live;
    std::vector<const Phase*> active;
    for (std::size_t l = 0; l < n; ++l) {
      if (next[l] < lanes[l].size()) {
        live.push_back(l);
        active.push_back(&lanes[l][next[l]]);
      }
    }
    if (live.empty()) break;
    const auto rate = phase_rates(active, dev.global_memory_bandwidth);

    double step = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < live.size(); ++a) {
      if (rate[a] > 0.0) step = std::min(step, remaining[live[a]] / rate[a]);
    }
    now += step;
    for (std::size_t a = 0; a < live.size(); ++a) {
      const std::size_t l = live[a];
      if (rate[a] <= 0.0) continue;
      const double left = remaining[l] - rate[a] * step;
      if (left <= 1e-12 * lanes[l][next[l]].work || remaining[l] / rate[a] == step) {
        remaining[l] = 0.0;
        finish_phase(l);
      } else {
        remaining[l] = left;
      }
    }
    begin_phases();
  }

  trace.fop_span = stage_end[1] - std::max(0.0, stage_start[1]);
  trace.hm_span = stage_end[2] - std::max(0.0, stage_start[2]);
  trace.period = std::max(now, ideal_period(st, buffering));
  return trace;
}

double contended_period(const StageTiming& st, const DeviceModel& dev, int buffering) {
  return contention_trace(st, dev, buffering).period;
}

// ---------------------------------------------------------------------------
// multiple devices and planning

double multi_device_period(const StageTiming& st, std::size_t n, Scheme scheme, const DeviceModel& dev,
                           double seconds_per_unit) {
  if (n < 1) throw std::invalid_argument("device count must be >= 1");
  dev.validate();
  const double nd = static_cast<double>(n);
  const double m = max_stage(st);
  switch (scheme) {
    case Scheme::single_input: return std::max({st.t_ft(), st.t_fop(), st.t_hm / nd});
    case Scheme::multi_input: return m / nd;
    case Scheme::multi_config: {
      if (n == 1) return m;
      const double handoff = st.fop_bytes / dev.host_link_bandwidth / seconds_per_unit;
      if (n == 2) return std::max(m, total_latency(st) - m) + handoff;
      return m + 2.0 * handoff;
    }
  }
  return m;
}

PipelinePlan plan(const StageTiming& st, const DeviceModel& dev, std::size_t n_devices, Scheme scheme,
                  std::optional<double> t_limit, double seconds_per_unit) {
  st.validate();
  dev.validate();
  if (n_devices < 1) throw std::invalid_argument("device count must be >= 1");

  PipelinePlan p;
  p.n_devices = n_devices;
  p.scheme = scheme;
  p.t_fdas = total_latency(st);
  if (p.t_fdas <= 0.0) {
    p.notes.push_back("zero total latency, nothing to pipeline");
    return p;
  }

  p.buffering = choose_buffering(st);
  while (p.buffering > 1 && static_cast<double>(p.buffering) * st.fop_bytes > dev.off_chip_capacity) {
    p.notes.push_back(std::to_string(p.buffering) + " planes of " + std::to_string(st.fop_bytes) +
                      " bytes exceed off-chip capacity, buffering lowered");
    --p.buffering;
    p.degraded = true;
  }

  p.period = contended_period(st, dev, p.buffering);
  if (p.period > p.t_fdas) {
    p.notes.push_back("contention makes overlapped stages slower than serial execution, buffering dropped");
    p.buffering = 1;
    p.period = p.t_fdas;
  }
  p.device_period = n_devices == 1 ? p.period : multi_device_period(st, n_devices, scheme, dev, seconds_per_unit);

  if (t_limit && dev.reconfig_time > *t_limit) {
    p.reconfiguration_allowed = false;
    p.notes.push_back("reconfiguration (" + std::to_string(dev.reconfig_time) + " s) exceeds t_limit, rejected");
  }
  return p;
}

void estimate_demands(StageTiming& st, const FdasConfig& config, double seconds_per_unit) {
  const double plane = static_cast<double>(config.n_temp) * config.n_chan * sizeof(float);
  double harmonic = 0.0;
  for (std::uint32_t k = 1; k <= config.n_hp; ++k) harmonic += 1.0 / k;
  if (st.fop_bytes == 0.0) st.fop_bytes = plane;

  auto rate = [&](double bytes, double t) { return t > 0.0 ? bytes / (t * seconds_per_unit) : 0.0; };
  double launch_time = 0.0;
  for (double v : st.ft_launch) launch_time += v;
  // complex input read and power written per template
  if (st.demand.ft == 0.0) st.demand.ft = rate(plane * 3.0, launch_time);
  if (st.demand.discard == 0.0) st.demand.discard = rate(2.0 * plane, st.t_discard);
  if (st.demand.transpose == 0.0) st.demand.transpose = rate(2.0 * plane, st.t_transpose);
  if (st.demand.reorder == 0.0) st.demand.reorder = rate(plane * (1.0 + harmonic), st.t_reorder);
  if (st.demand.fop == 0.0) st.demand.fop = rate(2.0 * plane, st.t_fop_unsplit);
  if (st.demand.hm == 0.0) st.demand.hm = rate(plane, st.t_hm);
}

// ---------------------------------------------------------------------------
// sweep and report

SweepReport sweep(const TimingSet& timings, const DeviceModel& dev, std::size_t n_devices, std::size_t threads) {
  if (timings.combinations.empty()) throw std::invalid_argument("sweep needs at least one combination");
  dev.validate();
  const double spu = timings.seconds_per_unit();

  SweepReport report;
  report.unit = timings.unit;
  report.n_devices = n_devices;
  report.rows.resize(timings.combinations.size());
  detail::parallel_for(report.rows.size(), threads, [&](std::size_t i) {
    const auto& c = timings.combinations[i];
    const StageTiming& st = c.timing;
    const PipelinePlan p = plan(st, dev, 1, Scheme::single_input, std::nullopt, spu);
    ReportRow& r = report.rows[i];
    r.combination = c.combination;
    r.t_ft = st.t_ft();
    r.t_fop = st.t_fop();
    r.t_hm = st.t_hm;
    r.t_fdas = p.t_fdas;
    r.buffering = p.buffering;
    r.degraded = p.degraded;
    r.period_ideal = ideal_period(st, p.buffering);
    r.period_contended = p.period;
    r.period_single_input = multi_device_period(st, n_devices, Scheme::single_input, dev, spu);
    r.period_multi_input = multi_device_period(st, n_devices, Scheme::multi_input, dev, spu);
    r.period_multi_config = multi_device_period(st, n_devices, Scheme::multi_config, dev, spu);
  });
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.period_contended != b.period_contended) return a.period_contended < b.period_contended;
    return a.combination < b.combination;
  });
  return report;
}

std::string report_to_json(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"combination", r.combination},
                    {"unit", report.unit},
                    {"t_ft", r.t_ft},
                    {"t_fop", r.t_fop},
                    {"t_hm", r.t_hm},
                    {"t_fdas", r.t_fdas},
                    {"buffering", r.buffering},
                    {"degraded", r.degraded},
                    {"period_ideal", r.period_ideal},
                    {"period_contended", r.period_contended},
                    {"n_devices", report.n_devices},
                    {"period_multidevice",
                     {{"single-input", r.period_single_input},
                      {"multi-input", r.period_multi_input},
                      {"multi-config", r.period_multi_config}}}});
  }
  return rows.dump(2) + "\n";
}

std::string report_to_csv(const SweepReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "rank,combination,unit,t_ft,t_fop,t_hm,t_fdas,buffering,degraded,period_ideal,period_contended,"
         "n_devices,period_single_input,period_multi_input,period_multi_config\n";
  std::size_t rank = 1;
  for (const auto& r : report.rows) {
    out << rank++ << ',' << r.combination << ',' << report.unit << ',' << r.t_ft << ',' << r.t_fop << ',' << r.t_hm
        << ',' << r.t_fdas << ',' << r.buffering << ',' << (r.degraded ? 1 : 0) << ',' << r.period_ideal << ','
        << r.period_contended << ',' << report.n_devices << ',' << r.period_single_input << ','
        << r.period_multi_input << ',' << r.period_multi_config << '\n';
  }
  return out.str();
}

}  // namespace fdas
