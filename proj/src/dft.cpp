#include "fdas/dft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdas {

DftPlan::DftPlan(std::size_t size, Direction direction) : size_(size), direction_(direction) {
  if (size < 2 || !is_power_of_two(size)) {
    throw std::invalid_argument("DFT size must be a power of two >= 2, got " + std::to_string(size));
  }
  const double sign = direction == Direction::forward ? -1.0 : 1.0;
  twiddles_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    const double a = sign * 2.0 * std::numbers::pi * double(k) / double(size);
    twiddles_[k] = cfloat(static_cast<float>(std::cos(a)), static_cast<float>(std::sin(a)));
  }

  unsigned bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  bitrev_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::uint32_t r = 0;
    for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
}

void DftPlan::transform(std::span<cfloat> data) const {
  if (data.size() != size_) {
    throw std::invalid_argument("DFT input length " + std::to_string(data.size()) + " != plan size " +
                                std::to_string(size_));
  }
  for (std::size_t i = 0; i < size_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= size_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = size_ / len;
    for (std::size_t start = 0; start < size_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cfloat w = twiddles_[k * stride];
        const cfloat a = data[start + k];
        const cfloat b = data[start + k + half] * w;
        data[start + k] = a + b;
        data[start + k + half] = a - b;
      }
    }
  }
  if (direction_ == Direction::inverse) {
    const float scale = 1.0f / static_cast<float>(size_);
    for (auto& v : data) v *= scale;
  }
}

void DftPlan::transform(std::span<const cfloat> in, std::span<cfloat> out) const {
  if (in.size() != size_ || out.size() != size_) {
    throw std::invalid_argument("DFT buffer length mismatch with plan size " + std::to_string(size_));
  }
  std::copy(in.begin(), in.end(), out.begin());
  transform(out);
}

ComplexSeries dft(const DftPlan& plan, const ComplexSeries& input) {
  ComplexSeries out(input.size());
  plan.transform(input.view(), out.data);
  return out;
}

}  // namespace fdas
