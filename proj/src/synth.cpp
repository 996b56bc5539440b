#include "fdas/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fdas {

ComplexSeries generate_input(const FdasConfig& config, const std::vector<Injection>& injections,
                             double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  for (const auto& inj : injections) {
    if (inj.channel >= config.n_chan) {
      throw std::out_of_range("injection channel " + std::to_string(inj.channel) + " >= n_chan " +
                              std::to_string(config.n_chan));
    }
    if (!(inj.amplitude > 0.0f)) throw std::invalid_argument("injection amplitude must be > 0");
    if (inj.harmonics < 1) throw std::invalid_argument("injection harmonics must be >= 1");
  }

  ComplexSeries x(config.n_chan);
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma / std::numbers::sqrt2);
    for (auto& v : x.data) {
      const double re = normal(rng);
      const double im = normal(rng);
      v = {static_cast<float>(re), static_cast<float>(im)};
    }
  }
  for (const auto& inj : injections) {
    for (std::uint32_t m = 1; m <= inj.harmonics; ++m) x[inj.channel / m] += cfloat(inj.amplitude, 0.0f);
  }
  return x;
}

FilterBank make_template_bank(std::uint32_t n_temp, std::uint32_t n_tap) {
  if (n_temp == 0 || n_temp % 2 == 0) throw std::invalid_argument("n_temp must be odd");
  if (n_tap == 0) throw std::invalid_argument("n_tap must be >= 1");

  FilterBank bank;
  bank.templates.resize(n_temp);
  const std::ptrdiff_t half = half_span(n_temp);
  for (std::size_t row = 0; row < n_temp; ++row) {
    const std::ptrdiff_t z = template_index(row, n_temp);
    const std::size_t az = static_cast<std::size_t>(z < 0 ? -z : z);
    const std::size_t len =
        half == 0 ? 1 : 1 + static_cast<std::size_t>(std::llround(double(az) * double(n_tap - 1) / double(half)));
    auto& h = bank.templates[row];
    h.resize(len);
    const double norm = 1.0 / std::sqrt(double(len));
    const double sign = z < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < len; ++j) {
      // quadratic phase across the template width models a linear drift
      const double phase = sign * std::numbers::pi * double(j) * double(j) / double(len);
      h[j] = cfloat(static_cast<float>(norm * std::cos(phase)), static_cast<float>(norm * std::sin(phase)));
    }
  }
  return bank;
}

}  // namespace fdas
