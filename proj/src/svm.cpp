#include "bitext/svm.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "bitext/error.hpp"

namespace bitext {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kCacheBytes = std::size_t{64} << 20;

/// Rows of Q_ij = y_i y_j K(x_i, x_j), computed on demand and kept in a
/// fixed number of slots with round-robin eviction.
class KernelRows {
 public:
  KernelRows(const Eigen::MatrixXd& x, std::span<const int> y, double gamma)
      : x_(x), y_(y), gamma_(gamma), n_(static_cast<std::size_t>(x.rows())) {
    const std::size_t budget_rows = kCacheBytes / (sizeof(double) * std::max<std::size_t>(n_, 1));
    const std::size_t slots = std::min(n_, std::max<std::size_t>(2, budget_rows));
    storage_.assign(slots, std::vector<double>(n_));
    owner_.assign(slots, kNone);
    slot_of_.assign(n_, kNone);
  }

  const std::vector<double>& row(std::size_t i) {
    if (slot_of_[i] != kNone) return storage_[slot_of_[i]];
    const std::size_t slot = next_;
    next_ = (next_ + 1) % storage_.size();
    if (owner_[slot] != kNone) slot_of_[owner_[slot]] = kNone;
    owner_[slot] = i;
    slot_of_[i] = slot;
    auto& r = storage_[slot];
    for (std::size_t j = 0; j < n_; ++j) {
      r[j] = y_[i] * y_[j] *
             rbf_kernel(x_.row(static_cast<Eigen::Index>(i)), x_.row(static_cast<Eigen::Index>(j)),
                        gamma_);
    }
    return r;
  }

  /// Returns both rows; `i`'s row stays valid while `j`'s is fetched.
  std::pair<const std::vector<double>*, const std::vector<double>*> rows(std::size_t i,
                                                                       std::size_t j) {
    const auto* ri = &row(i);
    if (slot_of_[j] == kNone && storage_.size() >= 2 && &storage_[next_] == ri) {
      next_ = (next_ + 1) % storage_.size();
    }
    const auto* rj = &row(j);
    return {ri, rj};
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const Eigen::MatrixXd& x_;
  std::span<const int> y_;
  double gamma_;
  std::size_t n_;
  std::vector<std::vector<double>> storage_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> slot_of_;
  std::size_t next_ = 0;
};

}  // namespace

RbfSvm RbfSvm::train(const Eigen::MatrixXd& x, std::span<const int> labels,
                     const SvmParams& params) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0 || labels.size() != n) throw TrainingError("SVM needs one label per sample");
  if (!(params.c > 0.0) || !(params.gamma > 0.0)) throw TrainingError("SVM needs C, gamma > 0");
  for (int y : labels) {
    if (y != 1 && y != -1) throw TrainingError("SVM labels must be +1 or -1");
  }
  const double c = params.c;
  KernelRows q(x, labels, params.gamma);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const double qd = 1.0;  // K(x, x) = 1 for the radial-basis kernel

  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  const std::size_t max_iter = std::max<std::size_t>(params.max_iter_factor * n, 1);
  std::size_t iter = 0;
  bool converged = false;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  for (; iter < max_iter; ++iter) {
    // Maximal violating index i, then j by the second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = kNone, j = kNone;
    for (std::size_t t = 0; t < n; ++t) {
      if (labels[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else {
        if (!lower(t) && grad[t] >= gmax) { gmax = grad[t]; i = t; }
      }
    }
    if (i == kNone) { converged = true; break; }
    const auto& qi = q.row(i);
    double obj_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (labels[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0.0) {
          double quad = qd + qd - 2.0 * labels[i] * qi[t];
          const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= obj_min) { obj_min = obj; j = t; }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          double quad = qd + qd + 2.0 * labels[i] * qi[t];
          const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= obj_min) { obj_min = obj; j = t; }
        }
      }
    }
    if (gmax + gmax2 < params.tolerance || j == kNone) { converged = true; break; }

    auto [row_i, row_j] = q.rows(i, j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (labels[i] != labels[j]) {
      double quad = qd + qd + 2.0 * (*row_i)[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = qd + qd - 2.0 * (*row_i)[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += (*row_i)[t] * dai + (*row_j)[t] * daj;
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = labels[t] * grad[t];
    if (upper(t)) {
      if (labels[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (labels[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = 0.0;
  if (n_free > 0) {
    rho = sum_free / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = (ub + lb) / 2.0;
  } else if (std::isfinite(ub)) {
    rho = ub;
  } else if (std::isfinite(lb)) {
    rho = lb;
  }

  std::size_t n_sv = 0;
  for (double a : alpha) n_sv += a > 0.0;
  Eigen::MatrixXd support(static_cast<Eigen::Index>(n_sv), x.cols());
  Eigen::VectorXd coef(static_cast<Eigen::Index>(n_sv));
  Eigen::Index k = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    support.row(k) = x.row(static_cast<Eigen::Index>(t));
    coef(k) = alpha[t] * labels[t];
    ++k;
  }
  RbfSvm svm(std::move(support), std::move(coef), rho, params.gamma);
  svm.iterations_ = iter;
  svm.converged_ = converged;
  return svm;
}

}  // namespace bitext
