#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tinspec/ar_model.hpp"
#include "tinspec/covariance.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"

namespace tinspec {

inline constexpr std::size_t kDefaultGridSize = std::size_t{1} << 14;

/// Relative level below which a sampled spectrum counts as touching zero.
inline constexpr double kSpectralZeroTolerance = 1e-12;

/// Power spectral density sampled at f_k = -1/2 + k/N, k = 0..N-1.
/// Integrals over [-1/2, 1/2) are the periodic rectangle rule (1/N) sum_k.
class SpectrumGrid {
 public:
  /// Takes raw samples, symmetrizes S(f_k) and S(f_{N-k}) and validates
  /// non-negativity; rounding-level negatives are clamped to zero.
  explicit SpectrumGrid(std::vector<double> values) : values_(std::move(values)) {
    const std::size_t n = values_.size();
    if (n < 2) throw InvalidInput("spectrum grid needs at least two samples");
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
      const double m = 0.5 * (values_[k] + values_[n - k]);
      values_[k] = values_[n - k] = m;
    }
    double peak = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite spectrum sample");
      peak = std::max(peak, std::abs(v));
    }
    for (double& v : values_) {
      if (v < 0.0) {
        if (v < -1e-12 * peak) throw InvalidInput("spectrum has negative samples");
        v = 0.0;
      }
    }
  }

  /// Evaluates s(f) on the non-negative half of the grid and mirrors it.
  template <class F>
  static SpectrumGrid evaluate(std::size_t n, F&& s) {
    if (n < 2) throw InvalidInput("spectrum grid needs at least two samples");
    std::vector<double> v(n);
    for (std::size_t k = 0; k <= n / 2; ++k) v[k] = s(frequency_of(k, n));
    for (std::size_t k = n / 2 + 1; k < n; ++k) v[k] = v[n - k];
    return SpectrumGrid(std::move(v));
  }

  static double frequency_of(std::size_t k, std::size_t n) {
    return -0.5 + static_cast<double>(k) / static_cast<double>(n);
  }

  std::size_t size() const { return values_.size(); }
  double frequency(std::size_t k) const { return frequency_of(k, values_.size()); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const { return values_; }

  double mean() const { return detail::pairwise_sum(values_) / static_cast<double>(values_.size()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  bool touches_zero() const { return min() < kSpectralZeroTolerance * mean(); }

 private:
  std::vector<double> values_;
};

namespace detail {

/// sum_k coeffs_k cos(2 pi k f) on the grid, with a shared cosine table.
inline std::vector<double> cosine_polynomial_on_grid(std::span<const double> coeffs, std::size_t n) {
  const CosineTable table(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t l = 0; l < coeffs.size(); ++l) s += coeffs[l] * table.at(l, k);
    out[k] = s;
  }
  return out;
}

/// (1/N) sum_k S_k cos(2 pi l f_k) for l = 0..max_lag, pairwise-summed.
inline std::vector<double> idtft_lags(std::span<const double> s, const CosineTable& table, std::size_t max_lag) {
  const std::size_t n = s.size();
  std::vector<double> c(max_lag + 1);
  std::vector<double> terms(n);
  for (std::size_t l = 0; l <= max_lag; ++l) {
    for (std::size_t k = 0; k < n; ++k) terms[k] = s[k] * table.at(l, k);
    c[l] = pairwise_sum(terms) / static_cast<double>(n);
  }
  return c;
}

}  // namespace detail

/// S(f) = sigma_w2 / sum_k lambda_k cos(2 pi k f) with
/// lambda_0 = sum a_l^2, lambda_k = 2 sum a_l a_{l+k}.
inline SpectrumGrid psd_from_ar(const ArModel& model, std::size_t n_grid = kDefaultGridSize) {
  if (!is_stable(model)) throw InvalidInput("AR model is not stable");
  const std::size_t p = model.order();
  std::vector<double> lambda(p + 1, 0.0);
  for (std::size_t k = 0; k <= p; ++k) {
    double s = 0.0;
    for (std::size_t l = 0; l + k <= p; ++l) {
      s += model.coeff(static_cast<long>(l)) * model.coeff(static_cast<long>(l + k));
    }
    lambda[k] = (k == 0) ? s : 2.0 * s;
  }
  auto denom = detail::cosine_polynomial_on_grid(lambda, n_grid);
  for (double& d : denom) d = model.sigma_w2() / d;
  return SpectrumGrid(std::move(denom));
}

/// S(f) = c_0 + 2 sum_{l>=1} c_l cos(2 pi l f) for a finitely supported
/// covariance (lags beyond the sequence are zero). Values are returned as
/// computed; negative samples mean the lags are not an MA covariance.
inline SpectrumGrid psd_from_finite_covariance(const CovarianceSequence& seq, std::size_t n_grid = kDefaultGridSize) {
  std::vector<double> coeffs(seq.values().begin(), seq.values().end());
  for (std::size_t l = 1; l < coeffs.size(); ++l) coeffs[l] *= 2.0;
  return SpectrumGrid(detail::cosine_polynomial_on_grid(coeffs, n_grid));
}

/// c_l = integral S(f) cos(2 pi l f) df for l = 0..max_lag.
inline CovarianceSequence idtft_covariances(const SpectrumGrid& s, std::size_t max_lag) {
  const detail::CosineTable table(s.size());
  return CovarianceSequence(detail::idtft_lags(s.values(), table, max_lag));
}

/// M_inf = integral df / S(f); +inf when S touches zero on the grid.
inline TinValue m_infinity(const SpectrumGrid& s) {
  if (s.touches_zero()) return TinValue::infinite();
  std::vector<double> inv(s.values().begin(), s.values().end());
  for (double& v : inv) v = 1.0 / v;
  return TinValue::finite(detail::pairwise_sum(inv) / static_cast<double>(inv.size()));
}

/// One-sided prediction error exp(integral log S df); 0 when S touches zero.
inline double osp_lmmse_szego(const SpectrumGrid& s) {
  if (s.touches_zero()) return 0.0;
  std::vector<double> logs(s.values().begin(), s.values().end());
  for (double& v : logs) v = std::log(v);
  return std::exp(detail::pairwise_sum(logs) / static_cast<double>(logs.size()));
}

struct SpectralMeans {
  double arithmetic;  // c_0
  double geometric;   // OSP LMMSE
  double harmonic;    // TSP LMMSE = 1 / M_inf
};

inline SpectralMeans spectral_means(const SpectrumGrid& s) {
  return {s.mean(), osp_lmmse_szego(s), m_infinity(s).reciprocal()};
}

struct PredictionGains {
  double osp_gain;  // (1/2) log(c_0 / OSP)
  double tsp_gain;  // (1/2) log(c_0 / TSP); +inf for a spectrum with zeros
};

inline PredictionGains prediction_gains(const SpectrumGrid& s) {
  const double c0 = s.mean();
  const double osp = osp_lmmse_szego(s);
  const TinValue minf = m_infinity(s);
  const double inf = std::numeric_limits<double>::infinity();
  // AM >= GM >= HM; clamp rounding-level negatives for constant spectra.
  return {osp > 0.0 ? std::max(0.0, 0.5 * std::log(c0 / osp)) : inf,
          minf.is_finite() ? std::max(0.0, 0.5 * std::log(c0 * minf.value())) : inf};
}

}  // namespace tinspec
