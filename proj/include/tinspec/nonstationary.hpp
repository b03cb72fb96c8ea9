#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/covariance.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/lmmse.hpp"

namespace tinspec {

/// Largest n for which k_of_n_tin enumerates every subset.
inline constexpr std::size_t kExactSubsetCap = 20;

/// Symmetric PSD covariance of n samples of a not necessarily stationary
/// process.
class GeneralCovariance {
 public:
  explicit GeneralCovariance(Eigen::MatrixXd c) : c_(std::move(c)) {
    if (c_.rows() == 0 || c_.rows() != c_.cols()) throw InvalidInput("covariance must be square and nonempty");
    if (!c_.allFinite()) throw InvalidInput("covariance has non-finite entries");
    scale_ = c_.diagonal().maxCoeff();
    if (!(scale_ > 0.0)) throw InvalidInput("covariance has no positive variance");
    if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_) throw InvalidInput("covariance is not symmetric");
    c_ = 0.5 * (c_ + c_.transpose());
    if (!detail::is_psd(c_, scale_)) throw InvalidInput("covariance is not positive semidefinite");
  }

  std::size_t size() const { return static_cast<std::size_t>(c_.rows()); }
  const Eigen::MatrixXd& matrix() const { return c_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return c_(i, j); }
  /// Largest variance; sets the singularity threshold.
  double scale() const { return scale_; }

  Eigen::MatrixXd submatrix(std::span<const long> s) const {
    const auto k = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd out(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) out(a, b) = c_(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
    }
    return out;
  }

 private:
  Eigen::MatrixXd c_;
  double scale_ = 0.0;
};

namespace detail {

/// Calls f on every k-subset of {0..n-1} in lexicographic order; stops
/// early when f returns false.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<long> s(k);
  for (std::size_t j = 0; j < k; ++j) s[j] = static_cast<long>(j);
  while (true) {
    if (!f(std::span<const long>(s))) return;
    std::size_t j = k;
    while (j > 0 && s[j - 1] == static_cast<long>(n - k + j - 1)) --j;
    if (j == 0) return;
    ++s[j - 1];
    for (std::size_t t = j; t < k; ++t) s[t] = s[t - 1] + 1;
  }
}

inline TinValue subset_tin(const GeneralCovariance& c, std::span<const long> s) {
  const auto f = leading_cholesky(c.submatrix(s), kSingularTolerance * c.scale());
  if (!f.complete()) return TinValue::infinite();
  return TinValue::finite(lower_inverse(f).squaredNorm() / static_cast<double>(s.size()));
}

inline void check_k(const GeneralCovariance& c, std::size_t k) {
  if (k < 1 || k > c.size()) throw InvalidInput("k must satisfy 1 <= k <= n");
}

}  // namespace detail

/// M_k^(n) by full enumeration; +inf as soon as one k-subset is singular.
inline TinValue k_of_n_tin_exact(const GeneralCovariance& c, std::size_t k) {
  detail::check_k(c, k);
  std::vector<double> terms;
  bool singular = false;
  detail::for_each_subset(c.size(), k, [&](std::span<const long> s) {
    const TinValue t = detail::subset_tin(c, s);
    if (t.is_infinite()) {
      singular = true;
      return false;
    }
    terms.push_back(t.value());
    return true;
  });
  if (singular) return TinValue::infinite();
  return TinValue::finite(detail::pairwise_sum(terms) / static_cast<double>(terms.size()));
}

struct SampledTin {
  TinValue estimate;
  double standard_error;  // of the mean; 0 when the estimate is infinite
  std::size_t samples;
};

/// Mean of (1/k) tr(C_S^{-1}) over uniformly drawn k-subsets.
inline SampledTin k_of_n_tin_sampled(const GeneralCovariance& c, std::size_t k, std::size_t samples,
                                     std::uint64_t seed) {
  detail::check_k(c, k);
  if (samples < 2) throw InvalidInput("need at least two samples");
  std::mt19937_64 rng(seed);
  std::vector<long> pool(c.size());
  std::vector<double> terms;
  terms.reserve(samples);
  for (std::size_t draw = 0; draw < samples; ++draw) {
    for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = static_cast<long>(j);
    for (std::size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    std::vector<long> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.begin(), s.end());
    const TinValue t = detail::subset_tin(c, s);
    if (t.is_infinite()) return {TinValue::infinite(), 0.0, draw + 1};
    terms.push_back(t.value());
  }
  const double n = static_cast<double>(terms.size());
  const double mean = detail::pairwise_sum(terms) / n;
  std::vector<double> dev(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) dev[j] = (terms[j] - mean) * (terms[j] - mean);
  const double var = detail::pairwise_sum(dev) / (n - 1.0);
  return {TinValue::finite(mean), std::sqrt(var / n), terms.size()};
}

struct KOfNOptions {
  std::size_t samples = 20000;
  std::uint64_t seed = 20240611;
};

/// Exact for n <= kExactSubsetCap, sampled estimate beyond.
inline TinValue k_of_n_tin(const GeneralCovariance& c, std::size_t k, const KOfNOptions& opt = {}) {
  if (c.size() <= kExactSubsetCap) return k_of_n_tin_exact(c, k);
  return k_of_n_tin_sampled(c, k, opt.samples, opt.seed).estimate;
}

/// M_1^(n), ..., M_n^(n) by enumeration.
inline std::vector<TinValue> k_of_n_profile(const GeneralCovariance& c) {
  if (c.size() > kExactSubsetCap) throw InvalidInput("profile needs n within the enumeration cap");
  std::vector<TinValue> out;
  for (std::size_t k = 1; k <= c.size(); ++k) out.push_back(k_of_n_tin_exact(c, k));
  return out;
}

/// True iff M_k^(n) <= M_{k+1}^(n) for every k, up to a 1e-10 relative slack.
inline bool check_subset_monotonicity(const GeneralCovariance& c) {
  const auto prof = k_of_n_profile(c);
  for (std::size_t k = 0; k + 1 < prof.size(); ++k) {
    if (prof[k].is_infinite()) {
      if (prof[k + 1].is_finite()) return false;
      continue;
    }
    if (prof[k + 1].is_infinite()) continue;
    if (prof[k + 1].value() < prof[k].value() * (1.0 - 1e-10)) return false;
  }
  return true;
}

struct CountingIdentity {
  double lhs;  // sum over |S| = k+1, i in S, l in S\{i} of 1/LMMSE(i | S\{i,l})
  double rhs;  // (n-k) * sum over |T| = k, i in T of 1/LMMSE(i | T\{i})
};

/// Both sides of the regrouping step behind the subset monotonicity: every
/// (T, i) with |T| = k arises from exactly n-k triples (S, i, l).
inline CountingIdentity subset_counting_identity(const GeneralCovariance& c, std::size_t k) {
  const std::size_t n = c.size();
  if (k < 1 || k >= n) throw InvalidInput("k must satisfy 1 <= k < n");
  auto recip = [&c](long i, std::vector<long> rest) {
    const double e = lmmse(c.matrix(), i, IndexSet(std::move(rest)));
    if (!(e > 0.0)) throw SingularMatrix("zero LMMSE in counting identity");
    return 1.0 / e;
  };
  std::vector<double> left, right;
  detail::for_each_subset(n, k + 1, [&](std::span<const long> s) {
    for (long i : s) {
      for (long l : s) {
        if (l == i) continue;
        std::vector<long> rest;
        for (long j : s) {
          if (j != i && j != l) rest.push_back(j);
        }
        left.push_back(recip(i, std::move(rest)));
      }
    }
    return true;
  });
  detail::for_each_subset(n, k, [&](std::span<const long> t) {
    for (long i : t) {
      std::vector<long> rest;
      for (long j : t) {
        if (j != i) rest.push_back(j);
      }
      right.push_back(recip(i, std::move(rest)));
    }
    return true;
  });
  return {detail::pairwise_sum(left), static_cast<double>(n - k) * detail::pairwise_sum(right)};
}

}  // namespace tinspec
