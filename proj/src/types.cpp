#include "fdas/types.hpp"

#include <algorithm>

namespace fdas {

std::size_t FilterBank::max_length() const {
  std::size_t n = 0;
  for (const auto& t : templates) n = std::max(n, t.size());
  return n;
}

Fop::Fop(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw StructuralError("plane of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                          " carries " + std::to_string(values_.size()) + " values");
  }
}

}  // namespace fdas
