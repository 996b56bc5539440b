#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fdas/types.hpp"

namespace fdas {

// Strategies for applying the template bank.
struct NaiveTd {
  friend bool operator==(const NaiveTd&, const NaiveTd&) = default;
};
/// Coefficients split into sub-filters of `n_paral` taps (overlap-add).
struct OlaTd {
  std::size_t n_paral = 128;
  friend bool operator==(const OlaTd&, const OlaTd&) = default;
};
struct NaiveFd {
  friend bool operator==(const NaiveFd&, const NaiveFd&) = default;
};
/// Input split into power-of-two chunks overlapping by n_tap-1 (overlap-save).
/// One engine transforms the input once for the whole bank; two engines
/// re-transform it for every template.
struct OlsFd {
  std::size_t chunk = 2048;
  unsigned engines = 1;
  friend bool operator==(const OlsFd&, const OlsFd&) = default;
};

using ConvStrategy = std::variant<NaiveTd, OlaTd, NaiveFd, OlsFd>;

std::string to_string(const ConvStrategy& s);
/// Names: naive-td, ola-td, naive-fd, ols-fd. `param` is n_paral or chunk.
ConvStrategy parse_conv_strategy(const std::string& name, std::size_t param);
/// Throws std::invalid_argument if the strategy cannot run taps of this length.
void validate(const ConvStrategy& s, std::size_t max_taps);
bool is_frequency_domain(const ConvStrategy& s);

/// Per-template output streams that still carry the overlap-save prefix of
/// `overlap` invalid points in every chunk.
template <typename T>
struct ChunkedPlane {
  std::size_t rows = 0;
  std::size_t chunk = 0;
  std::size_t overlap = 0;
  std::size_t chunk_count = 0;
  std::size_t valid_length = 0;
  std::vector<T> values;  // rows * chunk_count * chunk, row-major

  std::size_t advance() const { return chunk - overlap; }
  std::size_t row_length() const { return chunk_count * chunk; }
  std::span<T> row(std::size_t r) { return {values.data() + r * row_length(), row_length()}; }
  std::span<const T> row(std::size_t r) const { return {values.data() + r * row_length(), row_length()}; }
};

using RawComplex = ChunkedPlane<cfloat>;
using RawPower = ChunkedPlane<float>;

struct OlsGeometry {
  std::size_t overlap = 0;
  std::size_t advance = 0;
  std::size_t chunk_count = 0;
};
OlsGeometry ols_geometry(std::size_t input_length, std::size_t taps, std::size_t chunk);

/// y[i] = sum_j x[i-j] h[j], with x[i-j] = 0 for i-j < 0; output has x.size() points.
ComplexSeries fir_naive_td(std::span<const cfloat> x, std::span<const cfloat> h);

struct OlaResult {
  ComplexSeries y;
  std::size_t launch_count = 0;
  std::size_t padded_length = 0;
};
OlaResult fir_ola_td(std::span<const cfloat> x, std::span<const cfloat> h, std::size_t n_paral);

inline constexpr std::size_t kDefaultMaxTransform = std::size_t{1} << 22;

ComplexSeries fir_naive_fd(std::span<const cfloat> x, std::span<const cfloat> h,
                           std::size_t max_transform = kDefaultMaxTransform);

struct OlsResult {
  ComplexSeries y;  // after discard
  RawComplex raw;   // single row, before discard
};
OlsResult fir_ols_fd(std::span<const cfloat> x, std::span<const cfloat> h, std::size_t chunk);

/// out[i] = re(y[i])^2 + im(y[i])^2
std::vector<float> power_spectrum(std::span<const cfloat> y);
inline float power(cfloat v) { return v.real() * v.real() + v.imag() * v.imag(); }

struct ConvOptions {
  std::size_t threads = 1;
  /// Templates processed by one launch (filter replication).
  std::size_t filters_per_launch = 1;
  std::size_t max_transform = kDefaultMaxTransform;
};

struct ConvTiming {
  std::vector<double> launch_seconds;
  std::size_t input_transforms = 0;
  std::size_t filter_transforms = 0;
  std::size_t inverse_transforms = 0;
  std::size_t n_launch() const { return launch_seconds.size(); }
};

struct BankOutput {
  std::variant<Fop, RawPower> plane;  // RawPower for OlsFd
  ConvTiming timing;
};

/// Applies every template to `x` and emits powers. Time-domain strategies and
/// NaiveFd return a template-major Fop; OlsFd returns the undiscarded power plane.
BankOutput convolve_bank(std::span<const cfloat> x, const FilterBank& bank, const ConvStrategy& strategy,
                         const ConvOptions& options = {});

}  // namespace fdas
