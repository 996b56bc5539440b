#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fdas::cli {

struct VerifyCheck {
  std::string name;
  std::uint64_t seed = 0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t scale = 1u << 10;  // n_chan
  std::uint64_t seed = 1;
  std::size_t seeds = 3;
  std::size_t threads = 1;
  /// Test hook: perturb the FOP handed to this harmonic strategy.
  std::optional<std::string> corrupt;
};

/// n_temp used at a given n_chan; throws std::invalid_argument off the table.
std::uint32_t verify_templates(std::size_t scale);

std::vector<VerifyCheck> run_verify(const VerifyOptions& options);

}  // namespace fdas::cli
