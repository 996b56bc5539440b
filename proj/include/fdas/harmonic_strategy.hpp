#pragma once

#include <string>
#include <variant>

namespace fdas {

/// One harmonic plane at a time; every HP_k is written out in full.
struct SingleHp {
  std::size_t n_paral = 8;
  friend bool operator==(const SingleHp&, const SingleHp&) = default;
};
/// All harmonic planes per output point, reading the FOP directly.
struct NaiveMultipleHp {
  friend bool operator==(const NaiveMultipleHp&, const NaiveMultipleHp&) = default;
};
/// Loads every FOP point needed by a group of output columns once.
struct MultipleHpN {
  std::size_t cols_per_group = 1;
  friend bool operator==(const MultipleHpN&, const MultipleHpN&) = default;
};
/// Streams a reordered FOP block per group of output columns.
struct MultipleHpR {
  std::size_t cols_per_group = 16;
  std::size_t points_per_item = 4;
  friend bool operator==(const MultipleHpR&, const MultipleHpR&) = default;
};

using HarmonicStrategy = std::variant<SingleHp, NaiveMultipleHp, MultipleHpN, MultipleHpR>;

std::string to_string(const HarmonicStrategy& s);
/// Names: single, naive-multi, multi-n, multi-r. Zero parameters take defaults.
HarmonicStrategy parse_harmonic_strategy(const std::string& name, std::size_t cols, std::size_t ppi);
void validate(const HarmonicStrategy& s);

}  // namespace fdas
