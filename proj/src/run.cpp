#include "fdas/run.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fdas/signal_io.hpp"

namespace fdas {

void validate(const RunSpec& spec) {
  spec.config.validate();
  validate(spec.conv, spec.config.n_tap);
  validate(spec.hm);
  if (spec.n_devices < 1) throw std::invalid_argument("n_devices must be >= 1");
  if (spec.filters_per_launch < 1) throw std::invalid_argument("filters_per_launch must be >= 1");
  if (spec.noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  spec.device.validate();
  const PrepFlags need = required_transforms(spec.conv, spec.hm);
  if (need.any() && !spec.prep) {
    std::string steps;
    if (need.discard) steps += " discard";
    if (need.transpose) steps += " transpose";
    if (need.reorder) steps += " reorder";
    throw std::invalid_argument(to_string(spec.conv) + " -> " + to_string(spec.hm) + " needs FOP preparation (" +
                                steps.substr(1) + ") but the path has none");
  }
  for (const auto& inj : spec.injections) {
    if (inj.channel >= spec.config.n_chan) throw std::invalid_argument("injection channel outside the spectrum");
  }
}

std::string combination_name(const RunSpec& spec) {
  std::string name = to_string(spec.conv) + "+" + to_string(spec.hm);
  if (spec.prep == PrepSite::host && required_transforms(spec.conv, spec.hm).any()) name += "/host";
  return name;
}

ThresholdTable thresholds_for(const FdasConfig& config) {
  std::vector<double> t = config.thresholds;
  if (t.empty()) t.assign(config.n_hp, 1.0);
  return ThresholdTable::constant(t, config.n_temp);
}

RunResult run_combination(const RunSpec& spec, const ComplexSeries& input, const FilterBank& bank) {
  validate(spec);
  if (input.size() != spec.config.n_chan) throw std::invalid_argument("input length does not match n_chan");
  if (bank.size() != spec.config.n_temp) throw std::invalid_argument("template bank size does not match n_temp");

  ConvOptions copt;
  copt.threads = spec.threads;
  copt.filters_per_launch = spec.filters_per_launch;
  BankOutput conv = convolve_bank(input.view(), bank, spec.conv, copt);

  RunResult result;
  if (const auto* raw = std::get_if<RawPower>(&conv.plane)) {
    result.fop = discard(*raw);
  } else {
    result.fop = std::get<Fop>(conv.plane);
  }

  const std::size_t n_hp = spec.config.n_hp;
  PreparedPlane prepared =
      prepare(std::move(conv.plane), spec.conv, spec.hm, n_hp, spec.prep.value_or(PrepSite::device), spec.threads);
  if (const auto* r = std::get_if<RFop>(&prepared.plane)) result.rfop = *r;

  HarmonicParams hp;
  hp.n_hp = n_hp;
  hp.n_cand = spec.config.n_cand;
  hp.threads = spec.threads;
  const auto thresholds = thresholds_for(spec.config);
  HarmonicResult hm = harmonic_sum(prepared, spec.hm, thresholds, hp);
  result.candidates = std::move(hm.candidates);
  result.hm_stats = hm.stats;

  StageTiming& st = result.timing;
  st.ft_launch = conv.timing.launch_seconds;
  st.prep = prepared.timing.flags;
  st.t_discard = prepared.timing.t_discard;
  st.t_transpose = prepared.timing.t_transpose;
  st.t_reorder = prepared.timing.t_reorder;
  st.t_hm = hm.seconds;
  st.fop_bytes = static_cast<double>(result.fop.byte_size());
  estimate_demands(st, spec.config);

  result.plan = plan(st, spec.device, spec.n_devices, spec.scheme, spec.config.t_limit);
  return result;
}

RunResult run_combination(const RunSpec& spec) {
  validate(spec);
  const auto input = generate_input(spec.config, spec.injections, spec.noise_sigma, spec.seed);
  const auto bank = make_template_bank(spec.config.n_temp, spec.config.n_tap);
  return run_combination(spec, input, bank);
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StageTiming measure_timing(const RunSpec& spec, std::size_t reps) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  validate(spec);
  const auto input = generate_input(spec.config, spec.injections, spec.noise_sigma, spec.seed);
  const auto bank = make_template_bank(spec.config.n_temp, spec.config.n_tap);

  std::vector<StageTiming> runs;
  for (std::size_t r = 0; r < reps; ++r) runs.push_back(run_combination(spec, input, bank).timing);

  auto field = [&](auto get) {
    std::vector<double> v;
    for (const auto& st : runs) v.push_back(get(st));
    return median(std::move(v));
  };
  StageTiming out = runs.front();
  for (std::size_t i = 0; i < out.ft_launch.size(); ++i) {
    out.ft_launch[i] = field([i](const StageTiming& st) { return st.ft_launch[i]; });
  }
  out.t_discard = field([](const StageTiming& st) { return st.t_discard; });
  out.t_transpose = field([](const StageTiming& st) { return st.t_transpose; });
  out.t_reorder = field([](const StageTiming& st) { return st.t_reorder; });
  out.t_hm = field([](const StageTiming& st) { return st.t_hm; });
  out.demand = {};
  estimate_demands(out, spec.config);
  return out;
}

std::vector<RunSpec> combination_families(const RunSpec& base) {
  const std::size_t n_paral = std::max<std::size_t>(1, next_power_of_two(base.config.n_tap) / 4);
  const std::size_t chunk = std::max<std::size_t>(
      next_power_of_two(4 * base.config.n_tap), std::min<std::size_t>(2048, base.config.n_chan / 4));
  const ConvStrategy convs[] = {OlaTd{n_paral}, OlsFd{chunk, 1}};
  std::vector<RunSpec> out;
  for (const auto& c : convs) {
    const HarmonicStrategy hms[] = {NaiveMultipleHp{}, MultipleHpN{1}, MultipleHpR{16, 4}, SingleHp{8}};
    for (const auto& h : hms) {
      RunSpec s = base;
      s.conv = c;
      s.hm = h;
      s.prep = PrepSite::device;
      out.push_back(s);
      if (std::holds_alternative<MultipleHpR>(h)) {
        s.prep = PrepSite::host;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::string plan_to_json(const PipelinePlan& p, const std::string& combination) {
  nlohmann::json j = {{"combination", combination},
                      {"unit", "s"},
                      {"t_fdas", p.t_fdas},
                      {"buffering", p.buffering},
                      {"degraded", p.degraded},
                      {"period", p.period},
                      {"n_devices", p.n_devices},
                      {"scheme", to_string(p.scheme)},
                      {"device_period", p.device_period},
                      {"reconfiguration_allowed", p.reconfiguration_allowed},
                      {"notes", p.notes}};
  return j.dump(2) + "\n";
}

std::string plan_to_csv(const PipelinePlan& p, const std::string& combination) {
  std::ostringstream out;
  out.precision(17);
  out << "combination,unit,t_fdas,buffering,degraded,period,n_devices,scheme,device_period,reconfiguration_allowed\n"
      << combination << ",s," << p.t_fdas << ',' << p.buffering << ',' << (p.degraded ? 1 : 0) << ',' << p.period
      << ',' << p.n_devices << ',' << to_string(p.scheme) << ',' << p.device_period << ','
      << (p.reconfiguration_allowed ? 1 : 0) << '\n';
  return out.str();
}

void write_run_artifacts(const RunSpec& spec, const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string name = combination_name(spec);
  save_fop(result.fop, dir / "fop.bin");
  if (result.rfop) save_rfop(*result.rfop, dir / "rfop.bin");
  save_candidates_csv(result.candidates, dir / "candidates.csv");
  TimingSet ts;
  ts.unit = "s";
  ts.combinations.push_back({name, result.timing});
  save_timings(ts, dir / "timing.json");
  auto write = [&](const char* file, const std::string& text) {
    std::ofstream out(dir / file);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    out << text;
  };
  write("plan.json", plan_to_json(result.plan, name));
  write("plan.csv", plan_to_csv(result.plan, name));
}

}  // namespace fdas
