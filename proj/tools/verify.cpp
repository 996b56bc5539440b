#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fdas/convolution.hpp"
#include "fdas/fop_prep.hpp"
#include "fdas/harmonic.hpp"
#include "fdas/run.hpp"
#include "fdas/synth.hpp"

namespace fdas::cli {

namespace {

constexpr double kRelTol = 1e-4;

// Largest |a - b| relative to the peak of the matching reference row.
double row_relative_error(const Fop& ref, const Fop& x) {
  if (ref.rows() != x.rows() || ref.cols() != x.cols()) return INFINITY;
  double worst = 0.0;
  for (std::size_t r = 0; r < ref.rows(); ++r) {
    const auto a = ref.row(r);
    const auto b = x.row(r);
    double peak = 0.0;
    for (float v : a) peak = std::max(peak, static_cast<double>(std::abs(v)));
    if (peak == 0.0) peak = 1.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      worst = std::max(worst, std::abs(static_cast<double>(a[c]) - b[c]) / peak);
    }
  }
  return worst;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

Fop bank_fop(const ComplexSeries& x, const FilterBank& bank, const ConvStrategy& s, std::size_t threads) {
  ConvOptions opt;
  opt.threads = threads;
  auto out = convolve_bank(x.view(), bank, s, opt);
  if (auto* raw = std::get_if<RawPower>(&out.plane)) return discard(*raw);
  return std::get<Fop>(std::move(out.plane));
}

}  // namespace

std::uint32_t verify_templates(std::size_t scale) {
  static const std::map<std::size_t, std::uint32_t> table = {
      {1u << 10, 5}, {1u << 11, 9}, {1u << 12, 11}, {1u << 13, 13}, {1u << 14, 17}};
  const auto it = table.find(scale);
  if (it == table.end()) throw std::invalid_argument("scale must be a power of two from 1024 to 16384");
  return it->second;
}

std::vector<VerifyCheck> run_verify(const VerifyOptions& options) {
  FdasConfig config = FdasConfig::desk_scale();
  config.n_chan = static_cast<std::uint32_t>(options.scale);
  config.n_temp = verify_templates(options.scale);
  config.validate();

  const std::size_t taps = config.n_tap;
  const std::size_t quarter = std::max<std::size_t>(1, next_power_of_two(taps) / 4);
  const std::vector<ConvStrategy> convs = {OlaTd{quarter},        OlaTd{quarter * 2}, NaiveFd{},
                                           OlsFd{std::max<std::size_t>(256, 2 * next_power_of_two(taps)), 1},
                                           OlsFd{1024, 1},        OlsFd{1024, 2}};
  const std::vector<HarmonicStrategy> hms = {SingleHp{8}, NaiveMultipleHp{}, MultipleHpN{1}, MultipleHpN{4},
                                             MultipleHpR{16, 4}, MultipleHpR{8, 8}};

  std::vector<VerifyCheck> checks;
  const auto bank = make_template_bank(config.n_temp, config.n_tap);
  for (std::size_t s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = options.seed + s;
    const std::vector<Injection> inj = {{options.scale / 3, 4, 6.0f}};
    const auto x = generate_input(config, inj, 1.0, seed);

    // convolution strategies against the direct time-domain filter
    const Fop reference = bank_fop(x, bank, NaiveTd{}, options.threads);
    for (const auto& c : convs) {
      const double err = row_relative_error(reference, bank_fop(x, bank, c, options.threads));
      checks.push_back({"conv naive-td vs " + to_string(c), seed, err <= kRelTol, "max rel err " + fmt(err)});
    }

    // overlap-save with the prefix discarded against the direct filter, per template
    {
      double worst = 0.0;
      for (const auto& h : bank.templates) {
        const auto ols = fir_ols_fd(x.view(), h, 1024);
        const auto td = fir_naive_td(x.view(), h);
        double peak = 0.0;
        for (const auto& v : td.data) peak = std::max(peak, static_cast<double>(std::abs(v)));
        for (std::size_t i = 0; i < td.size(); ++i) {
          worst = std::max(worst, static_cast<double>(std::abs(td[i] - ols.y[i])) / std::max(peak, 1e-30));
        }
      }
      checks.push_back({"discard(ols-fd) vs naive-td", seed, worst <= kRelTol, "max rel err " + fmt(worst)});
    }

    // harmonic strategies against the direct evaluation
    HarmonicParams params;
    params.n_hp = config.n_hp;
    params.n_cand = config.n_cand;
    params.threads = options.threads;
    const auto thresholds = thresholds_for(config).scaled(4.0);
    const auto expected = harmonic_sum_naive(reference, thresholds, params).candidates;
    for (const auto& h : hms) {
      Fop input = reference;
      const std::string name = to_string(h);
      if (options.corrupt && name.rfind(*options.corrupt, 0) == 0) {
        auto& v = input.values();
        *std::max_element(v.begin(), v.end()) += 1000.0f;
      }
      const auto prepared = prepare(input, NaiveTd{}, h, config.n_hp, PrepSite::device, options.threads);
      const auto got = harmonic_sum(prepared, h, thresholds, params).candidates;
      checks.push_back({"harmonic naive vs " + name, seed, got == expected,
                        std::to_string(got.entries.size()) + " vs " + std::to_string(expected.entries.size()) +
                            " candidates"});
    }

    // every rFOP point equals the stretched FOP point it stands for
    {
      const RFop r = reorder(reference, 16, config.n_hp, PlaneLayout::template_major, options.threads);
      std::size_t bad = 0;
      const std::ptrdiff_t half = half_span(reference.rows());
      for (std::size_t k = 1; k <= config.n_hp; ++k) {
        for (std::ptrdiff_t i = -half; i <= half; ++i) {
          for (std::size_t j = 0; j < reference.cols(); ++j) {
            if (r.value(k, i, j) != stretch_lookup(reference, k, i, j)) ++bad;
          }
        }
      }
      checks.push_back({"rfop reconstruction", seed, bad == 0, std::to_string(bad) + " mismatched points"});
    }
  }
  return checks;
}

}  // namespace fdas::cli
