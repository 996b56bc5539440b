#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdas/types.hpp"

namespace fdas {

/// FDAS module parameters. Defaults are the full-scale survey values.
struct FdasConfig {
  std::uint32_t n_beams = 2000;
  std::uint32_t n_dm_trial = 6000;
  double t_obs = 540.0;
  std::uint32_t n_temp = 85;
  std::uint32_t n_chan = 1u << 21;
  std::uint32_t n_tap = 421;
  std::uint32_t n_hp = 8;
  std::uint32_t n_cand = 200;
  std::optional<double> t_limit;
  /// Per-harmonic detection threshold; empty means 1.0 for every harmonic.
  std::vector<double> thresholds;

  /// Small configuration used by the CLI and the oracle checks. Keeps odd
  /// template count and chunk > n_tap - 1 for every OLS chunk size.
  static FdasConfig desk_scale();

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;

  friend bool operator==(const FdasConfig&, const FdasConfig&) = default;
};

FdasConfig parse_config(const std::string& json_text);
std::string config_to_json(const FdasConfig& config);

FdasConfig load_config(const std::filesystem::path& path);
void save_config(const FdasConfig& config, const std::filesystem::path& path);

}  // namespace fdas
