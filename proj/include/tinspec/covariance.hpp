#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"

namespace tinspec {

/// Autocovariance lags c_0..c_{m-1} of a zero-mean WSS process.
class CovarianceSequence {
 public:
  explicit CovarianceSequence(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInput("covariance sequence is empty");
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidInput("covariance sequence has a non-finite lag");
    }
    if (!(values_.front() > 0.0)) throw InvalidInput("covariance sequence needs c_0 > 0");
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t lag) const { return values_[lag]; }
  double variance() const { return values_.front(); }
  std::span<const double> values() const { return values_; }

  /// c_{|lag|}; throws when |lag| is beyond the stored run.
  double at_lag(std::ptrdiff_t lag) const {
    const auto l = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    if (l >= values_.size()) throw InvalidInput("lag beyond the covariance sequence");
    return values_[l];
  }

  CovarianceSequence prefix(std::size_t count) const {
    if (count == 0 || count > values_.size()) throw InvalidInput("prefix length out of range");
    return CovarianceSequence({values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count)});
  }

  friend bool operator==(const CovarianceSequence&, const CovarianceSequence&) = default;

 private:
  std::vector<double> values_;
};

/// Symmetric Toeplitz matrix C_n with entries c_{|i-j|}.
class ToeplitzCovariance {
 public:
  ToeplitzCovariance(const CovarianceSequence& seq, std::size_t n) {
    if (n < 1 || n > seq.size()) throw InvalidInput("Toeplitz order out of range");
    const auto order = static_cast<Eigen::Index>(n);
    matrix_.resize(order, order);
    for (Eigen::Index i = 0; i < order; ++i) {
      for (Eigen::Index j = 0; j < order; ++j) matrix_(i, j) = seq.at_lag(i - j);
    }
  }

  std::size_t order() const { return static_cast<std::size_t>(matrix_.rows()); }
  double variance() const { return matrix_(0, 0); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

/// Extended-real Tin value: a finite non-negative real or +inf. The +inf
/// case is a tag, not a floating-point infinity.
class TinValue {
 public:
  static TinValue finite(double v) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("finite Tin must be a non-negative real");
    return TinValue(v, false);
  }
  static TinValue infinite() { return TinValue(0.0, true); }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw std::logic_error("value() on an infinite Tin");
    return value_;
  }
  /// 1/M with 1/inf = 0 (and 1/0 = inf as a double).
  double reciprocal() const {
    if (infinite_) return 0.0;
    return value_ > 0.0 ? 1.0 / value_ : std::numeric_limits<double>::infinity();
  }
  /// For plotting/serialization only.
  double to_double() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

  friend bool operator==(const TinValue& a, const TinValue& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const TinValue& a, const TinValue& b) {
    if (a.infinite_ || b.infinite_) {
      if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
      return a.infinite_ ? std::partial_ordering::greater : std::partial_ordering::less;
    }
    return a.value_ <=> b.value_;
  }

 private:
  TinValue(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

inline ToeplitzCovariance toeplitz_from_sequence(const CovarianceSequence& seq, std::size_t n) {
  return ToeplitzCovariance(seq, n);
}

/// True iff every Cholesky pivot of M exceeds tol * c_0.
inline bool is_positive_definite(const ToeplitzCovariance& m, double tol = kSingularTolerance) {
  const auto f = detail::leading_cholesky(m.matrix(), tol * m.variance());
  return f.complete();
}

namespace detail {

/// Levinson recursion over C_1..C_n. The prediction-error variances are the
/// Cholesky pivots of the Toeplitz matrix, and
///   tr C_{j+1}^{-1} - tr C_j^{-1} = ||a^(j)||^2 / sigma_j^2
/// for the order-j predictor a^(j) (leading 1 included).
struct ToeplitzScan {
  std::vector<double> trace_increments;  // one per positive pivot
  bool admissible = true;
  std::size_t order() const { return trace_increments.size(); }
};

inline ToeplitzScan levinson_scan(std::span<const double> c, std::size_t n) {
  const double c0 = c[0];
  const double singular = kSingularTolerance * c0;
  const double negative = kPsdTolerance * c0;
  ToeplitzScan out;
  out.trace_increments.reserve(n);
  std::vector<double> a{1.0}, next;
  a.reserve(n);
  double sigma2 = c0;
  out.trace_increments.push_back(1.0 / c0);
  for (std::size_t j = 1; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t l = 0; l < j; ++l) acc += a[l] * c[j - l];
    const double k = -acc / sigma2;
    next.assign(j + 1, 0.0);
    for (std::size_t l = 0; l < j; ++l) next[l] = a[l] + k * (l == 0 ? 0.0 : a[j - l]);
    next[j] = k;
    const double s = sigma2 * (1.0 - k * k);
    a.swap(next);
    if (s < -negative) {
      out.admissible = false;
      return out;
    }
    if (s <= singular) {
      // X_j is a linear function of X_0..X_{j-1}, so every later lag must obey
      // the same recursion for C_n to stay positive semidefinite.
      double norm1 = 0.0;
      for (double v : a) norm1 += std::abs(v);
      const double tol = kPsdTolerance * static_cast<double>(n) * c0 * norm1;
      for (std::size_t t = j + 1; t < n; ++t) {
        double e = 0.0;
        for (std::size_t l = 0; l <= j; ++l) e += a[l] * c[t - l];
        if (std::abs(e) > tol) {
          out.admissible = false;
          return out;
        }
      }
      return out;
    }
    sigma2 = s;
    double sq = 0.0;
    for (double v : a) sq += v * v;
    out.trace_increments.push_back(sq / sigma2);
  }
  return out;
}

}  // namespace detail

/// Admissibility: C_m (hence every C_k, k <= m) is positive semidefinite.
inline bool is_admissible(const CovarianceSequence& seq) {
  return detail::levinson_scan(seq.values(), seq.size()).admissible;
}

namespace detail {

/// (1/n) tr(A^{-1}) with the singular convention; `scale` sets the
/// singularity threshold and the PSD slack.
inline TinValue normalized_tin_of(const Eigen::MatrixXd& a, double scale) {
  const auto f = leading_cholesky(a, kSingularTolerance * scale);
  if (!f.complete()) {
    if (!is_psd(a, scale)) throw InvalidInput("covariance matrix is not positive semidefinite");
    return TinValue::infinite();
  }
  return TinValue::finite(lower_inverse(f).squaredNorm() / static_cast<double>(a.rows()));
}

}  // namespace detail

/// M_n = (1/n) tr(C_n^{-1}), +inf when C_n is singular.
inline TinValue normalized_tin(const ToeplitzCovariance& m) {
  return detail::normalized_tin_of(m.matrix(), m.variance());
}

/// M_1..M_{n_max} by the Levinson recursion, O(n_max^2) time and O(n_max)
/// memory; +inf from the first singular order on.
inline std::vector<TinValue> tin_sequence(const CovarianceSequence& seq, std::size_t n_max) {
  if (n_max < 1 || n_max > seq.size()) throw InvalidInput("n_max out of range");
  const auto scan = detail::levinson_scan(seq.values(), n_max);
  if (!scan.admissible) throw InvalidInput("covariance sequence is not admissible");

  std::vector<TinValue> out;
  out.reserve(n_max);
  double trace = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > scan.order()) {
      out.push_back(TinValue::infinite());
      continue;
    }
    trace += scan.trace_increments[n - 1];
    out.push_back(TinValue::finite(trace / static_cast<double>(n)));
  }
  return out;
}

/// The four blocks of A^{-1} for A = [A11 A12; A21 A22], A11 of size split.
struct PartitionedInverse {
  Eigen::MatrixXd top_left;
  Eigen::MatrixXd top_right;
  Eigen::MatrixXd bottom_left;
  Eigen::MatrixXd bottom_right;

  Eigen::MatrixXd assemble() const {
    const auto n1 = top_left.rows();
    const auto n2 = bottom_right.rows();
    Eigen::MatrixXd a(n1 + n2, n1 + n2);
    a << top_left, top_right, bottom_left, bottom_right;
    return a;
  }
};

namespace detail {

template <class Derived>
Eigen::MatrixXd checked_inverse(const Eigen::MatrixBase<Derived>& a, const char* what) {
  const Eigen::MatrixXd m = a;
  const double scale = m.diagonal().cwiseAbs().maxCoeff();
  const auto f = leading_cholesky(m, kSingularTolerance * scale);
  if (!f.complete()) throw SingularMatrix(std::string("singular block: ") + what);
  const Eigen::MatrixXd li = lower_inverse(f);
  return li.transpose() * li;
}

}  // namespace detail

/// Block inverse through Schur complements:
///   [ (A\A22)^{-1}            -A11^{-1} A12 (A\A11)^{-1} ]
///   [ -A22^{-1} A21 (A\A22)^{-1}  (A\A11)^{-1}           ]
template <class Derived>
PartitionedInverse partitioned_inverse(const Eigen::MatrixBase<Derived>& a, Eigen::Index split) {
  const auto n = a.rows();
  if (a.cols() != n) throw InvalidInput("partitioned_inverse needs a square matrix");
  if (split < 1 || split >= n) throw InvalidInput("split must satisfy 1 <= n1 < n");
  const auto n2 = n - split;
  const Eigen::MatrixXd a11 = a.topLeftCorner(split, split);
  const Eigen::MatrixXd a12 = a.topRightCorner(split, n2);
  const Eigen::MatrixXd a21 = a.bottomLeftCorner(n2, split);
  const Eigen::MatrixXd a22 = a.bottomRightCorner(n2, n2);

  const Eigen::MatrixXd a11_inv = detail::checked_inverse(a11, "A11");
  const Eigen::MatrixXd a22_inv = detail::checked_inverse(a22, "A22");
  const Eigen::MatrixXd s22_inv = detail::checked_inverse(a11 - a12 * a22_inv * a21, "A\\A22");
  const Eigen::MatrixXd s11_inv = detail::checked_inverse(a22 - a21 * a11_inv * a12, "A\\A11");

  return {s22_inv, -a11_inv * a12 * s11_inv, -a22_inv * a21 * s22_inv, s11_inv};
}

/// (A\A_ii)^{-1} through the matrix inversion lemma,
///   A_jj^{-1} + A_jj^{-1} A_ji (A\A_jj)^{-1} A_ij A_jj^{-1},
/// where `complement_of_top_left` selects i = 1 (else i = 2).
template <class Derived>
Eigen::MatrixXd inverse_schur_complement_mil(const Eigen::MatrixBase<Derived>& a, Eigen::Index split,
                                             bool complement_of_top_left) {
  const auto n = a.rows();
  if (a.cols() != n || split < 1 || split >= n) throw InvalidInput("bad partition");
  const auto n2 = n - split;
  const Eigen::MatrixXd a11 = a.topLeftCorner(split, split);
  const Eigen::MatrixXd a12 = a.topRightCorner(split, n2);
  const Eigen::MatrixXd a21 = a.bottomLeftCorner(n2, split);
  const Eigen::MatrixXd a22 = a.bottomRightCorner(n2, n2);
  if (complement_of_top_left) {
    // (A\A11)^{-1} = A22^{-1} + A22^{-1} A21 (A\A22)^{-1} A12 A22^{-1}
    const Eigen::MatrixXd a22_inv = detail::checked_inverse(a22, "A22");
    const Eigen::MatrixXd s22_inv = detail::checked_inverse(a11 - a12 * a22_inv * a21, "A\\A22");
    return a22_inv + a22_inv * a21 * s22_inv * a12 * a22_inv;
  }
  const Eigen::MatrixXd a11_inv = detail::checked_inverse(a11, "A11");
  const Eigen::MatrixXd s11_inv = detail::checked_inverse(a22 - a21 * a11_inv * a12, "A\\A11");
  return a11_inv + a11_inv * a12 * s11_inv * a21 * a11_inv;
}

}  // namespace tinspec
