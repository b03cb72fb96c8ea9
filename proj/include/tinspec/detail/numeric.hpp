#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tinspec {

/// Relative pivot threshold below which a covariance matrix is treated as
/// singular (pivots are conditional variances, compared against c_0).
inline constexpr double kSingularTolerance = 1e-12;

/// Relative slack on the smallest eigenvalue when testing positive
/// semidefiniteness; scaled by n * c_0.
inline constexpr double kPsdTolerance = 1e-10;

namespace detail {

/// Pairwise (cascade) summation. The result does not depend on how callers
/// chunk the work, only on element order.
inline double pairwise_sum(std::span<const double> x) {
  constexpr std::size_t kBlock = 16;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// Unpivoted Cholesky that stops at the first pivot not exceeding
/// `threshold`. Pivots are the squared diagonal of L, i.e. the successive
/// conditional variances of the leading principal submatrices.
struct LeadingCholesky {
  Eigen::MatrixXd lower;       // valid in its leading `order` rows/cols
  std::vector<double> pivots;  // pivots computed, including a failing one
  std::size_t order = 0;       // number of accepted pivots

  bool complete() const { return order == static_cast<std::size_t>(lower.rows()); }
  double min_pivot() const {
    double m = pivots.empty() ? 0.0 : pivots.front();
    for (double p : pivots) m = std::min(m, p);
    return m;
  }
};

inline LeadingCholesky leading_cholesky(const Eigen::MatrixXd& a, double threshold) {
  const auto n = a.rows();
  LeadingCholesky f;
  f.lower = Eigen::MatrixXd::Zero(n, n);
  f.pivots.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - f.lower.row(j).head(j).squaredNorm();
    f.pivots.push_back(d);
    if (!(d > threshold)) return f;
    const double ljj = std::sqrt(d);
    f.lower(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      f.lower(i, j) = (a(i, j) - f.lower.row(i).head(j).dot(f.lower.row(j).head(j))) / ljj;
    }
    ++f.order;
  }
  return f;
}

/// Inverse of the leading `order` x `order` block of a Cholesky factor.
inline Eigen::MatrixXd lower_inverse(const LeadingCholesky& f) {
  const auto r = static_cast<Eigen::Index>(f.order);
  const Eigen::MatrixXd l = f.lower.topLeftCorner(r, r);
  return l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(r, r));
}

inline bool is_psd(const Eigen::MatrixXd& a, double scale) {
  if (a.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double tol = kPsdTolerance * static_cast<double>(a.rows()) * scale;
  return es.eigenvalues().minCoeff() >= -tol;
}

/// cos(2 pi j / n) for j in [0, n).
class CosineTable {
 public:
  explicit CosineTable(std::size_t n) : table_(n) {
    for (std::size_t j = 0; j < n; ++j) {
      table_[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    }
  }

  /// cos(2 pi lag f_k) on the grid f_k = -1/2 + k/n.
  double at(std::size_t lag, std::size_t k) const {
    const std::size_t n = table_.size();
    const double sign = (lag % 2 == 0) ? 1.0 : -1.0;
    return sign * table_[(lag % n) * k % n];
  }

  std::size_t size() const { return table_.size(); }

 private:
  std::vector<double> table_;
};

}  // namespace detail
}  // namespace tinspec
