#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdas/fop_prep.hpp"
#include "fdas/harmonic_strategy.hpp"
#include "fdas/types.hpp"

namespace fdas {

/// Detection threshold TA(k, i) per harmonic k in 1..n_hp and signed template i.
class ThresholdTable {
 public:
  ThresholdTable(std::size_t n_hp, std::size_t rows, std::vector<double> values);
  /// TA(k, i) = per_harmonic[k-1] for every template.
  static ThresholdTable constant(const std::vector<double>& per_harmonic, std::size_t rows);

  std::size_t n_hp() const { return n_hp_; }
  std::size_t rows() const { return rows_; }
  double at(std::size_t k, std::ptrdiff_t i) const { return values_[(k - 1) * rows_ + storage_row(i, rows_)]; }

  /// Copy with every threshold multiplied by `factor`.
  ThresholdTable scaled(double factor) const;

 private:
  std::size_t n_hp_;
  std::size_t rows_;
  std::vector<double> values_;
};

struct Candidate {
  std::uint32_t harmonic = 0;
  std::int32_t template_index = 0;
  std::uint32_t channel = 0;
  float power = 0.0f;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// (harmonic ascending, power descending, channel ascending, template ascending)
bool canonical_less(const Candidate& a, const Candidate& b);

struct CandidateList {
  std::vector<Candidate> entries;
  std::size_t count(std::uint32_t harmonic) const;
  friend bool operator==(const CandidateList&, const CandidateList&) = default;
};

/// Top-n_cand per harmonic plane of the points strictly above threshold.
/// Ties in power are broken by (channel, template) so the kept set does not
/// depend on the order points are offered in.
class CandidateAccumulator {
 public:
  CandidateAccumulator(const ThresholdTable& thresholds, std::size_t n_cand);

  bool offer(std::uint32_t k, std::int32_t i, std::uint32_t j, float power);
  void merge(const CandidateAccumulator& other);
  CandidateList finish() const;

 private:
  const ThresholdTable* thresholds_;
  std::size_t n_cand_;
  std::vector<std::vector<Candidate>> heaps_;  // per harmonic, worst candidate at front
};

/// Single detection step; returns true if the point was kept.
bool detect(float hp_value, std::uint32_t k, std::int32_t i, std::uint32_t j, CandidateAccumulator& accumulator);

/// SP_k(i, j) = FOP(trunc(i / k), floor(j / k)) on a template-major plane.
float stretch_lookup(const Fop& fop, std::size_t k, std::ptrdiff_t i, std::size_t j);

struct HarmonicParams {
  std::size_t n_hp = 8;
  std::size_t n_cand = 200;
  std::size_t threads = 1;
};

struct NaiveHarmonicResult {
  std::vector<Fop> planes;  // HP_1 .. HP_n_hp
  CandidateList candidates;
};

/// Direct evaluation: materialises every harmonic plane, then sorts all
/// above-threshold points per plane and truncates. Reference for the
/// optimised traversals.
NaiveHarmonicResult harmonic_sum_naive(const Fop& fop, const ThresholdTable& thresholds, const HarmonicParams& params);

struct HarmonicStats {
  std::uint64_t plane_reads = 0;   // FOP / rFOP values read
  std::uint64_t plane_writes = 0;  // harmonic-plane values written out
  std::uint64_t hp_reads = 0;      // harmonic-plane values read back
  std::uint64_t materialized_bytes() const { return plane_writes * sizeof(float); }
};

struct HarmonicResult {
  CandidateList candidates;
  HarmonicStats stats;
  double seconds = 0.0;
};

HarmonicResult harmonic_sum(const PreparedPlane& input, const HarmonicStrategy& strategy,
                            const ThresholdTable& thresholds, const HarmonicParams& params);
/// Convenience for a template-major FOP (not valid for MultipleHpR).
HarmonicResult harmonic_sum(const Fop& fop, const HarmonicStrategy& strategy, const ThresholdTable& thresholds,
                            const HarmonicParams& params);

/// CSV with header `harmonic,template,channel,power`, one row per candidate.
void write_candidates_csv(std::ostream& out, const CandidateList& list);
CandidateList read_candidates_csv(std::istream& in);
void save_candidates_csv(const CandidateList& list, const std::filesystem::path& path);
CandidateList load_candidates_csv(const std::filesystem::path& path);

}  // namespace fdas
