#pragma once

#include <cstdint>
#include <vector>

#include "fdas/config.hpp"
#include "fdas/types.hpp"

namespace fdas {

/// A periodic signal placed in the frequency series. Power lands at
/// `channel` and at floor(channel / m) for m = 2..harmonics, so the m-fold
/// harmonic sum at `channel` collects every component.
struct Injection {
  std::size_t channel = 0;
  std::uint32_t harmonics = 1;
  float amplitude = 1.0f;
};

/// Deterministic synthetic input: injected tones plus circular complex
/// Gaussian noise with E|n|^2 = noise_sigma^2.
ComplexSeries generate_input(const FdasConfig& config, const std::vector<Injection>& injections,
                             double noise_sigma, std::uint64_t seed);

/// Chirp-shaped, unit-energy template bank. Template 0 is the identity
/// filter; template length grows linearly with |index| up to n_tap.
FilterBank make_template_bank(std::uint32_t n_temp, std::uint32_t n_tap);

}  // namespace fdas
