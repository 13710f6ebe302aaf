#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>

namespace bitext {

/// exp(-gamma * ||a - b||^2), squared distance summed in coefficient order.
template <typename DerivedA, typename DerivedB>
double rbf_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                  double gamma) {
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a.derived().coeff(i)) -
                        static_cast<double>(b.derived().coeff(i));
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

struct SvmParams {
  double c = 1.0;
  double gamma = 1.0;
  double tolerance = 1e-3;
  /// Iteration cap is this factor times the number of samples.
  std::size_t max_iter_factor = 10;
};

/// Soft-margin kernel classifier with a radial-basis kernel, trained on the
/// dual with second-order working-set selection.
class RbfSvm {
 public:
  RbfSvm() = default;
  RbfSvm(Eigen::MatrixXd support, Eigen::VectorXd coef, double rho, double gamma)
      : support_(std::move(support)), coef_(std::move(coef)), rho_(rho), gamma_(gamma) {}

  /// `labels` holds +1 or -1 per row of `x`.
  static RbfSvm train(const Eigen::MatrixXd& x, std::span<const int> labels,
                      const SvmParams& params);

  /// sum_i coef_i K(s_i, x) - rho; positive means the +1 class.
  template <typename Derived>
  double decision(const Eigen::MatrixBase<Derived>& x) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < support_.rows(); ++i) {
      sum += coef_(i) * rbf_kernel(support_.row(i), x, gamma_);
    }
    return sum - rho_;
  }

  const Eigen::MatrixXd& support() const noexcept { return support_; }
  /// alpha_i * y_i of each support vector.
  const Eigen::VectorXd& coef() const noexcept { return coef_; }
  double rho() const noexcept { return rho_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t iterations() const noexcept { return iterations_; }
  bool converged() const noexcept { return converged_; }

 private:
  Eigen::MatrixXd support_;
  Eigen::VectorXd coef_;
  double rho_ = 0.0;
  double gamma_ = 1.0;
  std::size_t iterations_ = 0;
  bool converged_ = false;
};

}  // namespace bitext
