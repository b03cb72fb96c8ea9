#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/covariance.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"

namespace tinspec {

/// Sorted set of distinct sample indices.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<long> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
      throw InvalidInput("index set has repeated indices");
    }
  }

  /// {0, ..., n-1} without `removed`.
  static IndexSet range_except(long n, long removed) {
    std::vector<long> idx;
    for (long j = 0; j < n; ++j) {
      if (j != removed) idx.push_back(j);
    }
    return IndexSet(std::move(idx));
  }
  static IndexSet range(long n) { return range_except(n, -1); }

  std::span<const long> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(long i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

 private:
  std::vector<long> indices_;
};

namespace detail {

/// LMMSE(i|S) = C_ii - C_iS C_S^{-1} C_iS^T evaluated through an
/// incremental Cholesky of C_S. Members of S whose pivot falls below the
/// threshold are dependent on earlier ones and are skipped; if any were
/// skipped the estimate must come out degenerate (zero), else the input is
/// reported as undetermined.
template <class Cov>
double lmmse_kernel(Cov&& cov, long i, std::span<const long> s, double scale) {
  const double cii = cov(i, i);
  if (s.empty()) return cii;
  const double threshold = kSingularTolerance * scale;

  const auto k = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd y(k);  // L^{-1} C_{S,i} over the accepted basis
  Eigen::Index r = 0;
  bool dropped = false;
  std::vector<long> basis;
  basis.reserve(s.size());
  for (long idx : s) {
    Eigen::VectorXd row(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      double v = cov(idx, basis[static_cast<std::size_t>(j)]);
      for (Eigen::Index t = 0; t < j; ++t) v -= row(t) * l(j, t);
      row(j) = v / l(j, j);
    }
    const double pivot = cov(idx, idx) - row.squaredNorm();
    if (!(pivot > threshold)) {
      dropped = true;
      continue;
    }
    l.row(r).head(r) = row.transpose();
    l(r, r) = std::sqrt(pivot);
    double v = cov(idx, i);
    for (Eigen::Index t = 0; t < r; ++t) v -= l(r, t) * y(t);
    y(r) = v / l(r, r);
    basis.push_back(idx);
    ++r;
  }
  double e = cii - y.head(r).squaredNorm();
  if (e <= threshold) return 0.0;
  if (dropped) throw NumericalDegeneracy("singular C_S and X_i is not determined by X_S");
  return e;
}

}  // namespace detail

/// LMMSE of X_i from X_S for the WSS process with the given lags.
/// Indices are arbitrary integers; only differences must stay below the
/// sequence length.
inline double lmmse(const CovarianceSequence& seq, long i, const IndexSet& s) {
  auto cov = [&seq](long a, long b) { return seq.at_lag(a - b); };
  if (s.contains(i)) return 0.0;
  return detail::lmmse_kernel(cov, i, s.indices(), seq.variance());
}

/// LMMSE of X_i from X_S for an arbitrary covariance matrix (0-based rows).
inline double lmmse(const Eigen::MatrixXd& c, long i, const IndexSet& s) {
  const auto n = static_cast<long>(c.rows());
  if (i < 0 || i >= n) throw InvalidInput("target index out of range");
  for (long j : s.indices()) {
    if (j < 0 || j >= n) throw InvalidInput("index set out of range");
  }
  if (s.contains(i)) return 0.0;
  auto cov = [&c](long a, long b) { return c(a, b); };
  double scale = c(i, i);
  for (long j : s.indices()) scale = std::max(scale, c(j, j));
  return detail::lmmse_kernel(cov, i, s.indices(), scale);
}

/// Diagonal of C_n^{-1}; entry i is 1 / LMMSE(i | [n]\{i}).
inline std::vector<double> inverse_diagonal_reciprocals(const ToeplitzCovariance& m) {
  const auto f = detail::leading_cholesky(m.matrix(), kSingularTolerance * m.variance());
  if (!f.complete()) throw SingularMatrix("covariance matrix is singular");
  const Eigen::MatrixXd li = detail::lower_inverse(f);
  std::vector<double> d(m.order());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = li.col(static_cast<Eigen::Index>(i)).squaredNorm();
  return d;
}

/// M_n as the mean of reciprocal leave-one-out LMMSEs (+inf if any is 0).
inline TinValue tin_via_lmmse(const ToeplitzCovariance& m) {
  const auto n = static_cast<long>(m.order());
  auto cov = [&m](long a, long b) { return m(a, b); };
  std::vector<double> recip;
  recip.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const auto rest = IndexSet::range_except(n, i);
    double e = 0.0;
    try {
      e = detail::lmmse_kernel(cov, i, rest.indices(), m.variance());
    } catch (const NumericalDegeneracy&) {
      // Within a singular PSD block some sample is always determined by the
      // others, so the leave-one-out set is degenerate: M_n = inf.
      return TinValue::infinite();
    }
    if (e == 0.0) return TinValue::infinite();
    recip.push_back(1.0 / e);
  }
  return TinValue::finite(detail::pairwise_sum(recip) / static_cast<double>(n));
}

/// Checks, for every i in [n],
///   LMMSE(i|[n]\{i}) >= LMMSE(i|[n+1]\{i}) and
///   LMMSE(i|[n]\{i}) >= LMMSE(i+1|[n+1]\{i+1}).
inline bool check_lmmse_monotonicity(const CovarianceSequence& seq, std::size_t n) {
  if (n < 1 || n + 1 > seq.size()) throw InvalidInput("need lags up to n");
  const auto nn = static_cast<long>(n);
  const double slack = 1e-12 * seq.variance();
  for (long i = 0; i < nn; ++i) {
    const double base = lmmse(seq, i, IndexSet::range_except(nn, i));
    const double grown = lmmse(seq, i, IndexSet::range_except(nn + 1, i));
    const double shifted = lmmse(seq, i + 1, IndexSet::range_except(nn + 1, i + 1));
    if (grown > base + slack || shifted > base + slack) return false;
  }
  return true;
}

}  // namespace tinspec
