#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fdas/config.hpp"
#include "fdas/run.hpp"
#include "fdas/signal_io.hpp"
#include "verify.hpp"

namespace fdas::cli {

namespace {

namespace fs = std::filesystem;

// Thrown for argument combinations CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Injection parse_injection(const std::string& text) {
  Injection inj;
  std::stringstream ss(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.empty() || parts.size() > 3) throw UsageError("--inject expects CH[:HARM[:AMP]], got '" + text + "'");
  try {
    std::size_t used = 0;
    inj.channel = std::stoul(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("channel");
    if (parts.size() > 1) {
      inj.harmonics = static_cast<std::uint32_t>(std::stoul(parts[1], &used));
      if (used != parts[1].size()) throw std::invalid_argument("harmonics");
    }
    if (parts.size() > 2) {
      inj.amplitude = std::stof(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("amplitude");
    }
  } catch (const std::logic_error&) {
    throw UsageError("--inject expects CH[:HARM[:AMP]], got '" + text + "'");
  }
  return inj;
}

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out_dir = ".";
};

FdasConfig load_or_default(const Common& c) {
  return c.config_path.empty() ? FdasConfig::desk_scale() : load_config(c.config_path);
}

struct RunArgs {
  Common common;
  std::string conv = "ols-fd";
  std::size_t conv_param = 0;
  std::string hm = "naive-multi";
  std::size_t hm_cols = 0;
  std::size_t hm_ppi = 0;
  std::string prep = "device";
  std::size_t devices = 1;
  std::string scheme = "single-input";
  std::size_t filters_per_launch = 1;
  std::vector<std::string> inject;
  double noise = 1.0;
  std::string input;
};

RunSpec build_spec(const RunArgs& a) {
  RunSpec spec;
  spec.config = load_or_default(a.common);
  try {
    spec.conv = parse_conv_strategy(a.conv, a.conv_param);
    spec.hm = parse_harmonic_strategy(a.hm, a.hm_cols, a.hm_ppi);
    spec.scheme = parse_scheme(a.scheme);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.prep == "device") spec.prep = PrepSite::device;
  else if (a.prep == "host") spec.prep = PrepSite::host;
  else spec.prep = std::nullopt;
  spec.n_devices = a.devices;
  spec.filters_per_launch = a.filters_per_launch;
  spec.seed = a.common.seed;
  spec.threads = a.common.threads;
  spec.noise_sigma = a.noise;
  for (const auto& s : a.inject) spec.injections.push_back(parse_injection(s));
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--config", c.config_path, "FDAS configuration JSON (default: desk scale)")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Seed for every random draw");
  sub->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::Range(1, 256));
  if (with_out) sub->add_option("--out", c.out_dir, "Output directory");
}

void add_strategy_flags(CLI::App* sub, RunArgs& a) {
  sub->add_option("--conv", a.conv, "Convolution strategy")
      ->check(CLI::IsMember({"naive-td", "ola-td", "naive-fd", "ols-fd"}));
  sub->add_option("--conv-param", a.conv_param, "n_paral for ola-td, chunk for ols-fd (0: default)");
  sub->add_option("--hm", a.hm, "Harmonic-summing strategy")
      ->check(CLI::IsMember({"single", "naive-multi", "multi-n", "multi-r"}));
  sub->add_option("--hm-cols", a.hm_cols, "Columns per group (n_paral for single; 0: default)");
  sub->add_option("--hm-ppi", a.hm_ppi, "Points per work item for multi-r (0: default)");
  sub->add_option("--prep", a.prep, "Where FOP preparation runs")->check(CLI::IsMember({"device", "host", "none"}));
  sub->add_option("--devices", a.devices, "Number of devices")->check(CLI::PositiveNumber);
  sub->add_option("--scheme", a.scheme, "Multi-device scheme")
      ->check(CLI::IsMember({"single-input", "multi-input", "multi-config"}));
  sub->add_option("--filters-per-launch", a.filters_per_launch, "Templates per convolution launch")
      ->check(CLI::PositiveNumber);
}

void add_signal_flags(CLI::App* sub, RunArgs& a) {
  sub->add_option("--inject", a.inject, "Inject a tone: CH[:HARM[:AMP]] (repeatable)");
  sub->add_option("--noise", a.noise, "Noise standard deviation")->check(CLI::NonNegativeNumber);
}

int cmd_gen(const RunArgs& a, std::ostream& out) {
  RunSpec spec = build_spec(a);
  const auto x = generate_input(spec.config, spec.injections, spec.noise_sigma, spec.seed);
  fs::create_directories(a.common.out_dir);
  save_series(x, fs::path(a.common.out_dir) / "input.bin");
  save_config(spec.config, fs::path(a.common.out_dir) / "config.json");
  out << "wrote " << x.size() << " channels to " << (fs::path(a.common.out_dir) / "input.bin").string() << "\n";
  return 0;
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  RunSpec spec = build_spec(a);
  ComplexSeries x;
  if (a.input.empty()) {
    x = generate_input(spec.config, spec.injections, spec.noise_sigma, spec.seed);
  } else {
    x = load_series(a.input);
  }
  const auto bank = make_template_bank(spec.config.n_temp, spec.config.n_tap);
  const RunResult r = run_combination(spec, x, bank);
  write_run_artifacts(spec, r, a.common.out_dir);

  out << std::setprecision(6);
  out << combination_name(spec) << "\n"
      << "  t_ft " << r.timing.t_ft() << " s, t_fop " << r.timing.t_fop() << " s, t_hm " << r.timing.t_hm << " s\n"
      << "  buffering " << r.plan.buffering << ", period " << r.plan.period << " s, t_fdas " << r.plan.t_fdas
      << " s\n"
      << "  " << r.candidates.entries.size() << " candidates\n";
  for (const auto& n : r.plan.notes) out << "  note: " << n << "\n";
  return 0;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  const auto checks = run_verify(opt);
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  const VerifyCheck* first_fail = nullptr;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << c.name << "  seed "
        << c.seed << "  " << c.detail << "\n";
    if (!c.pass && first_fail == nullptr) first_fail = &c;
  }
  if (first_fail != nullptr) {
    out << "first failure: " << first_fail->name << " (seed " << first_fail->seed << ")\n";
    return 1;
  }
  out << checks.size() << " checks passed\n";
  return 0;
}

struct SweepArgs {
  Common common;
  std::string timings;
  std::size_t devices = 1;
  std::string scheme = "single-input";
  std::size_t scale = 1u << 12;
  std::size_t reps = 5;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  TimingSet set;
  if (a.timings == "measure") {
    RunSpec base;
    base.config = load_or_default(a.common);
    if (!is_power_of_two(a.scale)) throw UsageError("--scale must be a power of two");
    base.config.n_chan = static_cast<std::uint32_t>(a.scale);
    base.seed = a.common.seed;
    base.threads = a.common.threads;
    base.injections = {{a.scale / 3, 4, 8.0f}};
    set.unit = "s";
    for (const auto& spec : combination_families(base)) {
      set.combinations.push_back({combination_name(spec), measure_timing(spec, a.reps)});
    }
    fs::create_directories(a.common.out_dir);
    save_timings(set, fs::path(a.common.out_dir) / "timings.json");
  } else {
    set = load_timings(a.timings);
  }
  if (set.combinations.empty()) throw UsageError("timing source lists no combinations");

  const Scheme scheme = parse_scheme(a.scheme);
  const SweepReport report = sweep(set, DeviceModel{}, a.devices, a.common.threads);
  fs::create_directories(a.common.out_dir);
  {
    std::ofstream f(fs::path(a.common.out_dir) / "report.json");
    f << report_to_json(report);
    std::ofstream g(fs::path(a.common.out_dir) / "report.csv");
    g << report_to_csv(report);
  }

  std::size_t width = 11;
  for (const auto& r : report.rows) width = std::max(width, r.combination.size());
  out << std::left << std::setw(static_cast<int>(width)) << "combination" << std::right << std::setw(12) << "t_fdas"
      << std::setw(5) << "buf" << std::setw(12) << "period" << std::setw(14) << to_string(scheme) << "  ("
      << report.unit << ", " << a.devices << " device" << (a.devices == 1 ? "" : "s") << ")\n";
  out << std::setprecision(6);
  for (const auto& r : report.rows) {
    const double dp = scheme == Scheme::single_input  ? r.period_single_input
                      : scheme == Scheme::multi_input ? r.period_multi_input
                                                      : r.period_multi_config;
    out << std::left << std::setw(static_cast<int>(width)) << r.combination << std::right << std::setw(12) << r.t_fdas
        << std::setw(5) << r.buffering << std::setw(12) << r.period_contended << std::setw(14) << dp << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier domain acceleration search pipeline", "fdas"};
  app.require_subcommand(1);

  RunArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic input series");
  add_common(gen, gen_args.common);
  add_signal_flags(gen, gen_args);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run one convolution x harmonic-summing combination");
  add_common(run_cmd, run_args.common);
  add_strategy_flags(run_cmd, run_args);
  add_signal_flags(run_cmd, run_args);
  run_cmd->add_option("--input", run_args.input, "Input series file (default: synthesise)")->check(CLI::ExistingFile);

  VerifyOptions verify_opt;
  std::string corrupt;
  auto* verify = app.add_subcommand("verify", "Cross-check every strategy against the reference paths");
  verify->add_option("--scale", verify_opt.scale, "n_chan: 1024, 2048, 4096, 8192 or 16384");
  verify->add_option("--seed", verify_opt.seed, "First seed");
  verify->add_option("--seeds", verify_opt.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  verify->add_option("--threads", verify_opt.threads, "Worker thread cap")->check(CLI::Range(1, 256));
  verify->add_option("--corrupt-fop", corrupt)->group("");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Pipeline-model report over a set of combinations");
  add_common(sweep_cmd, sweep_args.common);
  sweep_cmd->add_option("--timings", sweep_args.timings, "Timing JSON file, or 'measure'")->required();
  sweep_cmd->add_option("--devices", sweep_args.devices, "Number of devices")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--scheme", sweep_args.scheme, "Scheme shown in the table")
      ->check(CLI::IsMember({"single-input", "multi-input", "multi-config"}));
  sweep_cmd->add_option("--scale", sweep_args.scale, "n_chan for measure mode");
  sweep_cmd->add_option("--reps", sweep_args.reps, "Repetitions per measured timing")->check(CLI::PositiveNumber);

  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "fdas");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*gen) return cmd_gen(gen_args, out);
    if (*run_cmd) return cmd_run(run_args, out);
    if (*verify) {
      if (!corrupt.empty()) verify_opt.corrupt = corrupt;
      try {
        verify_templates(verify_opt.scale);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return cmd_verify(verify_opt, out);
    }
    if (*sweep_cmd) return cmd_sweep(sweep_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fdas::cli
