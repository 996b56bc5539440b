#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "fdas/run.hpp"
#include "fdas/signal_io.hpp"

namespace oracle {

/// Every convolution family against every harmonic-summing method, plus the
/// naive time and frequency paths, at the given config.
inline std::vector<fdas::RunSpec> all_combinations(const fdas::RunSpec& base) {
  auto specs = fdas::combination_families(base);
  for (const fdas::ConvStrategy& c : {fdas::ConvStrategy{fdas::NaiveTd{}}, fdas::ConvStrategy{fdas::NaiveFd{}}}) {
    fdas::RunSpec s = base;
    s.conv = c;
    s.hm = fdas::NaiveMultipleHp{};
    specs.push_back(s);
    s.hm = fdas::MultipleHpR{16, 4};
    specs.push_back(s);
  }
  return specs;
}

/// The tone is found when HP_H, H being its harmonic count, lists its channel
/// on the unaccelerated template.
inline bool recovered(const fdas::CandidateList& list, const fdas::Injection& inj) {
  return std::any_of(list.entries.begin(), list.entries.end(), [&](const fdas::Candidate& c) {
    return c.harmonic == inj.harmonics && c.template_index == 0 && c.channel == inj.channel;
  });
}

inline std::string fop_bytes(const fdas::Fop& f) {
  std::stringstream ss;
  fdas::write_fop(ss, f);
  return ss.str();
}

inline std::string candidate_bytes(const fdas::CandidateList& l) {
  std::stringstream ss;
  fdas::write_candidates_csv(ss, l);
  return ss.str();
}

}  // namespace oracle
