#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fdas/fop_prep.hpp"

namespace fdas {

/// Global-memory traffic rate of each stage while it runs, bytes per second.
struct BandwidthDemand {
  double ft = 0.0;
  double discard = 0.0;
  double transpose = 0.0;
  double reorder = 0.0;
  double fop = 0.0;  // unsplit FOP preparation
  double hm = 0.0;
  friend bool operator==(const BandwidthDemand&, const BandwidthDemand&) = default;
};

/// Stage latencies of one FDAS configuration. Times are in whatever unit the
/// producer chose (a timing file states it); the model never mixes units.
struct StageTiming {
  std::vector<double> ft_launch;  // t'_FT per launch
  double t_klo = 0.0;             // launch overhead per launch
  PrepFlags prep;                 // B1 discard, B2 transpose, B3 reorder
  double t_discard = 0.0;
  double t_transpose = 0.0;
  double t_reorder = 0.0;
  /// FOP preparation known only as a total (published numbers).
  double t_fop_unsplit = 0.0;
  double t_hm = 0.0;
  BandwidthDemand demand;
  double fop_bytes = 0.0;

  std::size_t n_ft_launch() const { return ft_launch.size(); }
  double t_ft() const;
  double t_fop() const;

  /// Throws std::invalid_argument on negative or non-finite values.
  void validate() const;

  /// One FT launch, no overhead, unsplit FOP time.
  static StageTiming lumped(double t_ft, double t_fop, double t_hm);

  friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

struct NamedTiming {
  std::string combination;
  StageTiming timing;
};

struct TimingSet {
  std::string unit = "s";
  std::vector<NamedTiming> combinations;

  /// Seconds per time unit; throws ParseError for an unknown unit.
  double seconds_per_unit() const;
};

/// {"unit": "ms", "combinations": [{"combination": ..., "t_ft": ..., ...}]}
/// Per combination either t_ft or ft_launch (+ t_klo), and either t_fop or
/// the prep flags with component times; when both are given they must agree.
TimingSet parse_timings(const std::string& json_text);
std::string timings_to_json(const TimingSet& set);
TimingSet load_timings(const std::filesystem::path& path);
void save_timings(const TimingSet& set, const std::filesystem::path& path);

}  // namespace fdas
