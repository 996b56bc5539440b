#pragma once

#include <span>
#include <vector>

#include "fdas/types.hpp"

namespace fdas {

enum class Direction { forward, inverse };

/// Iterative radix-2 transform of a fixed power-of-two size.
///
/// Forward uses the kernel exp(-2*pi*i*jk/N) and is unnormalised. Inverse uses
/// exp(+2*pi*i*jk/N) and scales by 1/N, so inverse(forward(x)) == x. Twiddles
/// are computed in double and stored in single precision. A plan is immutable
/// after construction; transform() may be called concurrently from several
/// threads as long as each call owns its buffers.
class DftPlan {
 public:
  DftPlan(std::size_t size, Direction direction);

  std::size_t size() const { return size_; }
  Direction direction() const { return direction_; }

  /// In-place transform; data.size() must equal size().
  void transform(std::span<cfloat> data) const;

  /// Out-of-place transform; sizes must equal size().
  void transform(std::span<const cfloat> in, std::span<cfloat> out) const;

 private:
  std::size_t size_;
  Direction direction_;
  std::vector<cfloat> twiddles_;       // size/2 entries
  std::vector<std::uint32_t> bitrev_;  // permutation
};

ComplexSeries dft(const DftPlan& plan, const ComplexSeries& input);

}  // namespace fdas
