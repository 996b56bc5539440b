#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdas/config.hpp"
#include "fdas/convolution.hpp"
#include "fdas/fop_prep.hpp"
#include "fdas/harmonic.hpp"
#include "fdas/pipeline_model.hpp"
#include "fdas/synth.hpp"
#include "fdas/timing.hpp"

namespace fdas {

/// One end-to-end FDAS configuration.
struct RunSpec {
  FdasConfig config = FdasConfig::desk_scale();
  ConvStrategy conv = OlsFd{};
  HarmonicStrategy hm = NaiveMultipleHp{};
  /// Where FOP preparation runs; nullopt means the path has no preparation step.
  std::optional<PrepSite> prep = PrepSite::device;
  std::size_t filters_per_launch = 1;
  std::size_t n_devices = 1;
  Scheme scheme = Scheme::single_input;
  DeviceModel device;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::vector<Injection> injections;
  double noise_sigma = 1.0;
};

/// Throws std::invalid_argument when the spec is outside the supported matrix.
void validate(const RunSpec& spec);

/// e.g. "aols-2048+multi-r-16x4/host"
std::string combination_name(const RunSpec& spec);

ThresholdTable thresholds_for(const FdasConfig& config);

struct RunResult {
  Fop fop;  // template-major, after discard
  std::optional<RFop> rfop;
  CandidateList candidates;
  HarmonicStats hm_stats;
  StageTiming timing;  // seconds
  PipelinePlan plan;
};

RunResult run_combination(const RunSpec& spec, const ComplexSeries& input, const FilterBank& bank);
/// Generates the input and bank from the spec's seed and config.
RunResult run_combination(const RunSpec& spec);

/// Median of `reps` runs, field by field.
StageTiming measure_timing(const RunSpec& spec, std::size_t reps = 5);

/// The combination families of the published comparison at desk scale:
/// OLA and OLS convolution against every harmonic-summing method, with
/// device and host preparation for MultipleHP-R.
std::vector<RunSpec> combination_families(const RunSpec& base);

std::string plan_to_json(const PipelinePlan& plan, const std::string& combination);
std::string plan_to_csv(const PipelinePlan& plan, const std::string& combination);

/// Writes fop.bin, candidates.csv, timing.json, plan.json, plan.csv and,
/// when present, rfop.bin into `dir`.
void write_run_artifacts(const RunSpec& spec, const RunResult& result, const std::filesystem::path& dir);

}  // namespace fdas
