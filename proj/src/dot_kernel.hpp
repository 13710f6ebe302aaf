#pragma once

#include <cstddef>
#include <vector>

#include "bitext/embedding.hpp"

namespace bitext::detail {

/// Embedding rows widened to double, zero-padded to a multiple of
/// kRowBlock rows and kDotLanes columns.
class PackedRows {
 public:
  static constexpr std::size_t kRowBlock = 4;

  explicit PackedRows(const EmbeddingMatrix& vectors);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t padded_rows() const noexcept { return padded_rows_; }
  std::size_t stride() const noexcept { return stride_; }
  const double* row(std::size_t i) const noexcept { return data_.data() + i * stride_; }

 private:
  std::size_t rows_;
  std::size_t padded_rows_;
  std::size_t stride_;
  std::vector<double> data_;
};

/// out[i * ldo + j] = lane_dot(a_i, b_j) for i < na, j < nb. `na` must be a
/// multiple of 4, `nb` a multiple of 2, `stride` a multiple of kDotLanes.
void dot_tile(const double* a, std::size_t na, const double* b, std::size_t nb,
              std::size_t stride, double* out, std::size_t ldo);

}  // namespace bitext::detail
