#include "dot_kernel.hpp"

#include <cstring>

namespace bitext::detail {

namespace {

typedef double Lanes __attribute__((vector_size(kDotLanes * sizeof(double))));

}  // namespace

double lane_dot(const double* a, const double* b, std::size_t n) {
  double s[kDotLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t padded = padded_dim(n);
  for (std::size_t d = 0; d < padded; ++d) {
    const double x = d < n ? a[d] : 0.0;
    const double y = d < n ? b[d] : 0.0;
    s[d % kDotLanes] += x * y;
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

PackedRows::PackedRows(const EmbeddingMatrix& vectors)
    : rows_(static_cast<std::size_t>(vectors.rows())),
      padded_rows_((rows_ + kRowBlock - 1) / kRowBlock * kRowBlock),
      stride_(padded_dim(static_cast<std::size_t>(vectors.cols()))),
      data_(padded_rows_ * stride_, 0.0) {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (Eigen::Index d = 0; d < vectors.cols(); ++d) {
      data_[i * stride_ + static_cast<std::size_t>(d)] =
          static_cast<double>(vectors(static_cast<Eigen::Index>(i), d));
    }
  }
}

// The vector lanes are exactly the scalar lanes of lane_dot; without
// contraction both paths round identically on every target.
__attribute__((target_clones("avx2", "default")))
void dot_tile(const double* a, std::size_t na, const double* b, std::size_t nb,
              std::size_t stride, double* out, std::size_t ldo) {
  auto load = [](const double* p) {
    Lanes v;
    std::memcpy(&v, p, sizeof v);
    return v;
  };
  auto reduce = [](Lanes s) { return (s[0] + s[1]) + (s[2] + s[3]); };

  for (std::size_t i = 0; i < na; i += 4) {
    const double* a0 = a + i * stride;
    const double* a1 = a0 + stride;
    const double* a2 = a1 + stride;
    const double* a3 = a2 + stride;
    for (std::size_t j = 0; j < nb; j += 2) {
      const double* b0 = b + j * stride;
      const double* b1 = b0 + stride;
      Lanes s00{}, s01{}, s10{}, s11{}, s20{}, s21{}, s30{}, s31{};
      for (std::size_t d = 0; d < stride; d += kDotLanes) {
        const Lanes x0 = load(b0 + d);
        const Lanes x1 = load(b1 + d);
        Lanes y = load(a0 + d);
        s00 += y * x0;
        s01 += y * x1;
        y = load(a1 + d);
        s10 += y * x0;
        s11 += y * x1;
        y = load(a2 + d);
        s20 += y * x0;
        s21 += y * x1;
        y = load(a3 + d);
        s30 += y * x0;
        s31 += y * x1;
      }
      double* o = out + i * ldo + j;
      o[0] = reduce(s00);
      o[1] = reduce(s01);
      o[ldo] = reduce(s10);
      o[ldo + 1] = reduce(s11);
      o[2 * ldo] = reduce(s20);
      o[2 * ldo + 1] = reduce(s21);
      o[3 * ldo] = reduce(s30);
      o[3 * ldo + 1] = reduce(s31);
    }
  }
}

}  // namespace bitext::detail
