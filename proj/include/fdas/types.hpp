#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdas {

using cfloat = std::complex<float>;

/// Malformed input file or text (config JSON, timing JSON, CSV).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file or plane whose dimensions disagree with its payload.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

/// One dedispersed frequency series.
struct ComplexSeries {
  std::vector<cfloat> data;

  ComplexSeries() = default;
  explicit ComplexSeries(std::size_t n) : data(n) {}
  explicit ComplexSeries(std::vector<cfloat> values) : data(std::move(values)) {}

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  cfloat& operator[](std::size_t i) { return data[i]; }
  const cfloat& operator[](std::size_t i) const { return data[i]; }
  std::span<const cfloat> view() const { return data; }

  friend bool operator==(const ComplexSeries&, const ComplexSeries&) = default;
};

/// Bank of FIR templates. Template `row` corresponds to the signed
/// acceleration index `row - (size()-1)/2`.
struct FilterBank {
  std::vector<std::vector<cfloat>> templates;

  std::size_t size() const { return templates.size(); }
  bool empty() const { return templates.empty(); }
  std::size_t max_length() const;
};

/// Signed template index <-> storage row. Rows are centred on index 0.
constexpr std::ptrdiff_t half_span(std::size_t rows) {
  return static_cast<std::ptrdiff_t>(rows == 0 ? 0 : (rows - 1) / 2);
}
constexpr std::size_t storage_row(std::ptrdiff_t template_index, std::size_t rows) {
  return static_cast<std::size_t>(template_index + half_span(rows));
}
constexpr std::ptrdiff_t template_index(std::size_t row, std::size_t rows) {
  return static_cast<std::ptrdiff_t>(row) - half_span(rows);
}

/// Dense row-major plane of single-precision powers. Template-major when it
/// comes out of the convolution stage (row = template, column = channel).
class Fop {
 public:
  Fop() = default;
  Fop(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}
  Fop(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  std::size_t byte_size() const { return values_.size() * sizeof(float); }

  float& at(std::size_t row, std::size_t col) { return values_[row * cols_ + col]; }
  float at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

  /// Access by signed template index (template-major planes only).
  float at_template(std::ptrdiff_t i, std::size_t col) const { return at(storage_row(i, rows_), col); }

  std::span<float> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const float> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::vector<float>& values() { return values_; }
  const std::vector<float>& values() const { return values_; }

  friend bool operator==(const Fop&, const Fop&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

}  // namespace fdas
