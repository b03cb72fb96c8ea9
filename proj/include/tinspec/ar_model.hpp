#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/covariance.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"

namespace tinspec {

/// AR(p) model  sum_l a_l X_{i-l} = W_i  with a_0 = 1 and Var W = sigma_w2.
/// Stability is not enforced here; see is_stable().
class ArModel {
 public:
  ArModel(std::vector<double> coeffs, double sigma_w2) : a_(std::move(coeffs)), sigma_w2_(sigma_w2) {
    if (a_.empty() || a_.front() != 1.0) throw InvalidInput("AR coefficients must start with a_0 = 1");
    for (double v : a_) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite AR coefficient");
    }
    if (!(sigma_w2_ > 0.0) || !std::isfinite(sigma_w2_)) throw InvalidInput("sigma_w2 must be positive");
  }

  static ArModel white(double variance) { return ArModel({1.0}, variance); }

  std::size_t order() const { return a_.size() - 1; }
  std::span<const double> coeffs() const { return a_; }
  /// a_l, zero outside [0, p].
  double coeff(long l) const {
    return (l < 0 || static_cast<std::size_t>(l) >= a_.size()) ? 0.0 : a_[static_cast<std::size_t>(l)];
  }
  double sigma_w2() const { return sigma_w2_; }

  double sum_squares() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return s;
  }

 private:
  std::vector<double> a_;
  double sigma_w2_;
};

/// Roots of z^p A(z) = z^p + a_1 z^{p-1} + ... + a_p (companion eigenvalues).
inline std::vector<std::complex<double>> ar_poles(const ArModel& model) {
  const auto p = static_cast<Eigen::Index>(model.order());
  if (p == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = -model.coeff(j + 1);
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

/// All poles strictly inside the unit circle, with margin 1e-9.
inline bool is_stable(const ArModel& model) {
  for (const auto& z : ar_poles(model)) {
    if (!(1.0 - std::abs(z) > 1e-9)) return false;
  }
  return true;
}

/// Yule-Walker fit of order p = size - 1, solved as the dense system
/// C_p a_bar = -c_bar, sigma_w2 = c_0 + a_bar . c_bar.
inline ArModel yule_walker_fit(const CovarianceSequence& seq) {
  const std::size_t p = seq.size() - 1;
  const ToeplitzCovariance full(seq, p + 1);
  const auto chol = detail::leading_cholesky(full.matrix(), kSingularTolerance * seq.variance());
  if (!chol.complete()) throw SingularMatrix("C_{p+1} is singular; no unique AR(p) fit");
  if (p == 0) return ArModel::white(seq.variance());

  const auto pp = static_cast<Eigen::Index>(p);
  const Eigen::MatrixXd cp = full.matrix().topLeftCorner(pp, pp);
  Eigen::VectorXd cbar(pp);
  for (Eigen::Index l = 0; l < pp; ++l) cbar(l) = seq[static_cast<std::size_t>(l + 1)];
  const Eigen::VectorXd abar = cp.llt().solve(-cbar);

  std::vector<double> a(p + 1, 1.0);
  for (Eigen::Index l = 0; l < pp; ++l) a[static_cast<std::size_t>(l + 1)] = abar(l);
  const double sigma_w2 = seq.variance() + abar.dot(cbar);
  return ArModel(std::move(a), sigma_w2);
}

/// Extends known lags 0..p to lags 0..n with c_l = -sum_{k>=1} a_k c_{l-k}.
inline CovarianceSequence ar_extend_covariance(const ArModel& model, const CovarianceSequence& c_known,
                                               std::size_t n) {
  const std::size_t p = model.order();
  if (c_known.size() < p + 1) throw InvalidInput("need lags 0..p to extend an AR(p) model");
  std::vector<double> c(c_known.values().begin(), c_known.values().end());
  c.resize(std::max(c.size(), n + 1));
  for (std::size_t l = c_known.size(); l <= n; ++l) {
    double v = 0.0;
    for (std::size_t k = 1; k <= p; ++k) v -= model.coeff(static_cast<long>(k)) * c[l - k];
    c[l] = v;
  }
  c.resize(n + 1);
  return CovarianceSequence(std::move(c));
}

/// Autocovariance lags 0..max_lag of a stable AR model: solves the p+1
/// equations sum_k a_k c_{|l-k|} = sigma_w2 delta_l for c_0..c_p, then
/// applies the recursion.
inline CovarianceSequence ar_autocovariance(const ArModel& model, std::size_t max_lag) {
  if (!is_stable(model)) throw InvalidInput("AR model is not stable");
  const auto p = static_cast<Eigen::Index>(model.order());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (Eigen::Index l = 0; l <= p; ++l) {
    for (Eigen::Index k = 0; k <= p; ++k) sys(l, std::abs(l - k)) += model.coeff(k);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
  rhs(0) = model.sigma_w2();
  const Eigen::VectorXd c = sys.fullPivLu().solve(rhs);
  std::vector<double> lags(c.data(), c.data() + c.size());
  return ar_extend_covariance(model, CovarianceSequence(std::move(lags)), max_lag);
}

/// Closed-form C_n^{-1} of an AR(p) process, n >= p:
///   sigma_w2 [C^{-1}]_{ij} = sum_{l=0}^{i-1} a_l a_{l+j-i} - sum_{l=n+1-j}^{n+i-j} a_l a_{l+j-i}
/// (1-based, i <= j).
inline Eigen::MatrixXd gohberg_semencul_inverse(const ArModel& model, std::size_t n) {
  if (n < model.order() || n == 0) throw InvalidInput("gohberg_semencul_inverse needs n >= p");
  const auto nn = static_cast<long>(n);
  Eigen::MatrixXd inv(nn, nn);
  for (long i = 1; i <= nn; ++i) {
    for (long j = i; j <= nn; ++j) {
      const long d = j - i;
      double v = 0.0;
      for (long l = 0; l <= i - 1; ++l) v += model.coeff(l) * model.coeff(l + d);
      for (long l = nn + 1 - j; l <= nn + i - j; ++l) v -= model.coeff(l) * model.coeff(l + d);
      inv(i - 1, j - 1) = inv(j - 1, i - 1) = v / model.sigma_w2();
    }
  }
  return inv;
}

/// M_n = (1/sigma_w2) sum_{l=0}^{n} (1 - 2l/n) a_l^2, valid for n >= p.
inline double ar_normalized_tin(const ArModel& model, std::size_t n) {
  if (n < model.order() || n == 0) throw InvalidInput("ar_normalized_tin needs n >= p");
  double s = 0.0;
  for (std::size_t l = 0; l <= std::min(n, model.order()); ++l) {
    const double a = model.coeff(static_cast<long>(l));
    s += (1.0 - 2.0 * static_cast<double>(l) / static_cast<double>(n)) * a * a;
  }
  return s / model.sigma_w2();
}

struct PredictionErrors {
  double osp;  // one-sided: present from the infinite past
  double tsp;  // two-sided: present from infinite past and future
};

/// OSP = sigma_w2, TSP = sigma_w2 / sum a_l^2.
inline PredictionErrors ar_osp_tsp_lmmse(const ArModel& model) {
  if (!is_stable(model)) throw InvalidInput("AR model is not stable");
  return {model.sigma_w2(), model.sigma_w2() / model.sum_squares()};
}

}  // namespace tinspec
