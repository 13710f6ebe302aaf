#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <filesystem>

#include "bitext/corpus.hpp"
#include "bitext/error.hpp"

namespace bitext {

enum class Origin { noisy, clean };

/// Row-major so that one sentence vector is contiguous in memory.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using EmbeddingMatrix = RowMatrix<float>;

namespace detail {

/// Number of interleaved partial sums used by every dot product in the
/// library. Coordinate d is accumulated into lane d % kDotLanes, in order,
/// and the lanes are combined as (s0 + s1) + (s2 + s3). Fixing this order
/// makes tiled and pairwise products bit-identical.
inline constexpr std::size_t kDotLanes = 4;

constexpr std::size_t padded_dim(std::size_t dim) {
  return (dim + kDotLanes - 1) / kDotLanes * kDotLanes;
}

/// Lane-ordered dot product over `n` doubles; `n` is padded with zeros
/// up to a multiple of kDotLanes.
double lane_dot(const double* a, const double* b, std::size_t n);

}  // namespace detail

/// Cosine of two unit vectors: the lane-ordered dot product in double
/// precision, clamped to [-1, 1]. Throws DataError on a dimension mismatch.
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw DataError("cosine of vectors with different dimensions");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(detail::padded_dim(a.size()));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    x(i) = static_cast<double>(a.derived().coeff(i));
    y(i) = static_cast<double>(b.derived().coeff(i));
  }
  return std::clamp(detail::lane_dot(x.data(), y.data(), x.size()), -1.0, 1.0);
}

/// Unit-normalized sentence vectors of one side of one collection.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Normalizes every row to unit L2 norm. Throws DataError naming the first
  /// row with zero or non-finite norm.
  EmbeddingSet(EmbeddingMatrix vectors, Side side, Origin origin);

  Eigen::Index size() const noexcept { return vectors_.rows(); }
  Eigen::Index dim() const noexcept { return vectors_.cols(); }
  Side side() const noexcept { return side_; }
  Origin origin() const noexcept { return origin_; }
  const EmbeddingMatrix& vectors() const noexcept { return vectors_; }
  auto row(Eigen::Index i) const { return vectors_.row(i); }

 private:
  EmbeddingMatrix vectors_;
  Side side_ = Side::src;
  Origin origin_ = Origin::noisy;
};

/// Reads headerless little-endian float32 rows of `dim` values.
/// Throws FormatError when the file size is not a positive multiple of
/// 4 * dim bytes.
EmbeddingSet load_embeddings(const std::filesystem::path& path, std::size_t dim, Side side,
                             Origin origin);

void write_embeddings(const EmbeddingMatrix& vectors, const std::filesystem::path& path);

}  // namespace bitext
