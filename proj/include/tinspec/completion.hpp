#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/ar_model.hpp"
#include "tinspec/covariance.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/rar_fit.hpp"
#include "tinspec/rar_spectrum.hpp"
#include "tinspec/spectrum.hpp"

namespace tinspec {

enum class CompletionMethod { maxent, mintin_step, mintin_greedy, mintin_rar, maxtin };

inline std::string_view to_string(CompletionMethod m) {
  switch (m) {
    case CompletionMethod::maxent: return "maxent";
    case CompletionMethod::mintin_step: return "mintin_step";
    case CompletionMethod::mintin_greedy: return "mintin_greedy";
    case CompletionMethod::mintin_rar: return "mintin_rar";
    case CompletionMethod::maxtin: return "maxtin";
  }
  return "unknown";
}

/// Accepts the enum spelling with '_' or '-'.
inline std::optional<CompletionMethod> parse_completion_method(std::string name) {
  for (char& ch : name) {
    if (ch == '-') ch = '_';
  }
  for (auto m : {CompletionMethod::maxent, CompletionMethod::mintin_step, CompletionMethod::mintin_greedy,
                 CompletionMethod::mintin_rar, CompletionMethod::maxtin}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

using CompletionModel = std::variant<std::monostate, ArModel, RarSpectrum>;

struct CompletionResult {
  CompletionMethod method;
  CovarianceSequence covariances;
  CompletionModel model;
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::vector<double>> series;
};

namespace detail {

inline void require_prefix_pd(const CovarianceSequence& seq, const char* what) {
  if (!is_positive_definite(ToeplitzCovariance(seq, seq.size()))) throw SingularMatrix(what);
}

/// -sum_{l=1}^{p} a_l c_{p+1-l}
inline double ar_prediction(const ArModel& model, const CovarianceSequence& seq) {
  const std::size_t p = model.order();
  double v = 0.0;
  for (std::size_t l = 1; l <= p; ++l) v -= model.coeff(static_cast<long>(l)) * seq[p + 1 - l];
  return v;
}

/// |den| / sum a_l^2 below which alpha counts as infinite. The fitted a_l
/// carry rounding of order eps * cond(C), and the skipped offset is at most
/// about half this ratio times sigma_w2.
inline constexpr double kInfiniteAlphaRatio = 1.4901161193847656e-8;  // sqrt(eps)

/// Offset of the MinTin lag from the MaxEnt lag, in units of sigma_w2,
/// i.e. alpha - sign(alpha) sqrt(alpha^2 - 1); zero on the alpha = inf branch.
inline double mintin_offset(const ArModel& model, double* alpha_out = nullptr) {
  const std::size_t p = model.order();
  double den = 0.0;
  for (std::size_t l = 1; l <= p; ++l) {
    den += model.coeff(static_cast<long>(l)) * model.coeff(static_cast<long>(p + 1 - l));
  }
  const double num = model.sum_squares();
  if (std::abs(den) <= kInfiniteAlphaRatio * num) {
    if (alpha_out) *alpha_out = std::numeric_limits<double>::infinity();
    return 0.0;
  }
  const double alpha = num / den;
  if (alpha_out) *alpha_out = alpha;
  if (std::abs(alpha) < 1.0) throw NumericalDegeneracy("mintin_next: |alpha| < 1");
  const double sign = alpha > 0.0 ? 1.0 : -1.0;
  return sign / (std::abs(alpha) + std::sqrt(alpha * alpha - 1.0));
}

inline CovarianceSequence appended(const CovarianceSequence& seq, double value) {
  std::vector<double> c(seq.values().begin(), seq.values().end());
  c.push_back(value);
  return CovarianceSequence(std::move(c));
}

}  // namespace detail

/// Lag p+1 of the AR(p) fitted to lags 0..p.
inline double maxent_next(const CovarianceSequence& seq) {
  return detail::ar_prediction(yule_walker_fit(seq), seq);
}

/// Lag p+1 maximizing the TSP LMMSE of the fitted AR(p+1), equivalently
/// minimizing tr(C_{p+2}^{-1}).
inline double mintin_next(const CovarianceSequence& seq) {
  const ArModel model = yule_walker_fit(seq);
  return detail::ar_prediction(model, seq) + detail::mintin_offset(model) * model.sigma_w2();
}

/// (1/(p+2)) tr(C_{p+2}^{-1}) for a trial lag, from tr(C_{p+1}^{-1}) and the
/// Schur complement of the bordered matrix; +inf when the trial is not
/// admissible.
inline TinValue mintin_step_tin_oracle(const CovarianceSequence& seq, double c_next) {
  const std::size_t p = seq.size() - 1;
  const ToeplitzCovariance cp(seq, p + 1);
  const auto f = detail::leading_cholesky(cp.matrix(), kSingularTolerance * seq.variance());
  if (!f.complete()) throw SingularMatrix("mintin_step_tin_oracle needs C_{p+1} positive definite");
  const Eigen::MatrixXd li = detail::lower_inverse(f);

  const auto n = static_cast<Eigen::Index>(p + 1);
  Eigen::VectorXd cbar(n);  // (c_{p+1}, c_p, ..., c_1)
  cbar(0) = c_next;
  for (Eigen::Index i = 1; i < n; ++i) cbar(i) = seq[static_cast<std::size_t>(n - i)];
  const Eigen::VectorXd y = li * cbar;               // L^{-1} cbar
  const Eigen::VectorXd x = li.transpose() * y;      // C^{-1} cbar
  const double schur = seq.variance() - y.squaredNorm();
  if (!(schur > kSingularTolerance * seq.variance())) return TinValue::infinite();
  const double trace = li.squaredNorm() + (1.0 + x.squaredNorm()) / schur;
  return TinValue::finite(trace / static_cast<double>(p + 2));
}

/// AR(p) (Burg / MaxEnt) extension to lags 0..max_lag.
inline CompletionResult maxent_extend(const CovarianceSequence& seq, std::size_t max_lag) {
  if (max_lag + 1 < seq.size()) throw InvalidInput("max_lag shorter than the prefix");
  ArModel model = yule_walker_fit(seq);
  CompletionResult out{CompletionMethod::maxent, ar_extend_covariance(model, seq, max_lag), model, {}, {}};
  out.diagnostics["sigma_w2"] = model.sigma_w2();
  out.diagnostics["order"] = static_cast<double>(model.order());
  return out;
}

/// Prefix plus the single MinTin lag p+1, with the fitted AR(p+1).
inline CompletionResult mintin_step(const CovarianceSequence& seq) {
  const ArModel base = yule_walker_fit(seq);
  double alpha = 0.0;
  const double offset = detail::mintin_offset(base, &alpha);
  const double next = detail::ar_prediction(base, seq) + offset * base.sigma_w2();
  auto ext = detail::appended(seq, next);
  ArModel model = yule_walker_fit(ext);
  CompletionResult out{CompletionMethod::mintin_step, std::move(ext), model, {}, {}};
  out.diagnostics["alpha"] = alpha;
  out.diagnostics["maxent_next"] = detail::ar_prediction(base, seq);
  out.diagnostics["tsp_lmmse"] = model.sigma_w2() / model.sum_squares();
  return out;
}

/// Repeated MinTin steps to lags 0..max_lag. The AR fit is carried along
/// with the Levinson order update: the step offset mu sigma_w2 fixes the
/// reflection coefficient k = -mu.
inline CompletionResult greedy_mintin_extend(const CovarianceSequence& seq, std::size_t max_lag) {
  if (max_lag + 1 < seq.size()) throw InvalidInput("max_lag shorter than the prefix");
  ArModel model = yule_walker_fit(seq);
  std::vector<double> c(seq.values().begin(), seq.values().end());
  std::vector<double> a(model.coeffs().begin(), model.coeffs().end());
  double sigma = model.sigma_w2();
  std::vector<double> alphas, reflections;

  while (c.size() <= max_lag) {
    const ArModel cur(a, sigma);
    double alpha = 0.0;
    const double mu = detail::mintin_offset(cur, &alpha);
    const std::size_t p = a.size() - 1;
    double pred = 0.0;
    for (std::size_t l = 1; l <= p; ++l) pred -= a[l] * c[p + 1 - l];
    c.push_back(pred + mu * sigma);

    const double k = -mu;
    std::vector<double> next(p + 2);
    for (std::size_t l = 0; l <= p + 1; ++l) {
      const double al = l <= p ? a[l] : 0.0;
      const double ar = l >= 1 ? a[p + 1 - l] : 0.0;
      next[l] = al + k * ar;
    }
    a = std::move(next);
    sigma *= 1.0 - k * k;
    if (!(sigma > kSingularTolerance * seq.variance())) {
      throw NumericalDegeneracy("greedy extension lost positive definiteness");
    }
    alphas.push_back(alpha);
    reflections.push_back(k);
  }

  ArModel last(a, sigma);
  CompletionResult out{CompletionMethod::mintin_greedy, CovarianceSequence(std::move(c)), last, {}, {}};
  out.diagnostics["sigma_w2"] = sigma;
  out.series["alpha"] = std::move(alphas);
  out.series["reflection"] = std::move(reflections);
  return out;
}

/// MinTin (RAR) extension to lags 0..max_lag; the given lags are kept
/// verbatim and later lags come from the fitted spectrum.
inline CompletionResult rar_extend(const CovarianceSequence& seq, std::size_t max_lag,
                                   const RarFitOptions& opt = {}) {
  if (max_lag + 1 < seq.size()) throw InvalidInput("max_lag shorter than the prefix");
  if (2 * max_lag >= opt.n_grid) throw InvalidInput("max_lag must be below n_grid / 2");
  const RarFitResult fit = rar_fit(seq, opt);
  if (!fit.converged) {
    throw SolverFailure("rar_fit did not converge (residual " + std::to_string(fit.residual_norm) + ")",
                        fit.residual_norm);
  }
  const SpectrumGrid s = psd_rar(fit.spectrum, opt.n_grid);
  std::vector<double> c = detail::idtft_lags(s.values(), detail::CosineTable(s.size()), max_lag);
  std::copy(seq.values().begin(), seq.values().end(), c.begin());

  CompletionResult out{CompletionMethod::mintin_rar, CovarianceSequence(std::move(c)), fit.spectrum, {}, {}};
  out.diagnostics["residual_norm"] = fit.residual_norm;
  out.diagnostics["iterations"] = fit.iterations;
  out.diagnostics["starts"] = fit.starts;
  out.diagnostics["optima"] = static_cast<double>(fit.optima.size());
  out.diagnostics["m_infinity"] = m_infinity(s).to_double();
  out.series["optima_residuals"] = fit.optima_residuals;
  return out;
}

struct MaMatch {
  std::size_t k;               // support size: lags 0..k-1
  CovarianceSequence covariances;
};

/// Finite-support admissible continuation of lags 0..m-1. For the smallest
/// k >= m with the scaled Toeplitz matrix [c_l k/(k-l)] positive definite,
/// the scaled lags are extended by their AR(m-1) fit up to lag k-1 and then
/// Bartlett-windowed by (k-l)/k, which returns the given lags.
///
/// The scaling perturbs C_m by entries c_l l/(k-l), whose spectral norm is
/// below 2 m^2 c_0 / (k-m); so some k <= m + 2 m^2 c_0 / lambda_min(C_m)
/// always works and bounds the search.
inline MaMatch ma_match(const CovarianceSequence& seq) {
  const std::size_t m = seq.size();
  detail::require_prefix_pd(seq, "ma_match needs C_m positive definite");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ToeplitzCovariance(seq, m).matrix(),
                                                          Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues()(0);
  const double bound = static_cast<double>(m) + 2.0 * static_cast<double>(m * m) * seq.variance() / lambda_min;
  constexpr double kMaxSupport = 1 << 24;
  if (!(bound <= kMaxSupport)) throw SolverFailure("ma_match: C_m too ill-conditioned for a finite support", bound);
  const auto k_max = std::max(m, static_cast<std::size_t>(std::ceil(bound)));

  for (std::size_t k = m; k <= k_max; ++k) {
    std::vector<double> d(m);
    for (std::size_t l = 0; l < m; ++l) {
      d[l] = seq[l] * static_cast<double>(k) / static_cast<double>(k - l);
    }
    const CovarianceSequence scaled(d);
    if (!is_positive_definite(ToeplitzCovariance(scaled, m))) continue;

    const ArModel model = yule_walker_fit(scaled);
    const auto extended = ar_extend_covariance(model, scaled, k - 1);
    std::vector<double> w(extended.values().begin(), extended.values().end());
    w.resize(k);
    for (std::size_t l = 0; l < k; ++l) w[l] *= static_cast<double>(k - l) / static_cast<double>(k);
    std::copy(seq.values().begin(), seq.values().end(), w.begin());
    return {k, CovarianceSequence(std::move(w))};
  }
  throw SolverFailure("ma_match: no admissible support size below the perturbation bound", bound);
}

enum class MaxTinVariant { comb, periodic };

inline std::string_view to_string(MaxTinVariant v) { return v == MaxTinVariant::comb ? "comb" : "periodic"; }

/// Smallest multiple of 2 D that is >= n_grid; on such grids the zeros
/// f = (2j+1)/(2D) of 1 + cos(2 pi f D) are grid nodes.
inline std::size_t aligned_grid_size(std::size_t delay, std::size_t n_grid) {
  if (delay == 0) throw InvalidInput("delay must be positive");
  const std::size_t step = 2 * delay;
  return ((n_grid + step - 1) / step) * step;
}

/// Completion with M_inf = +inf. Both variants start from the MA match
/// (order q = k-1) and use P = D = m+q, so the prefix is untouched:
///   comb:     c_t + (c_{t-D} + c_{t+D}) / 2, spectrum S_MA (1 + cos 2 pi f D)
///   periodic: sum_j c_{t+jP}, singular from C_{P+1} on.
inline CompletionResult maxtin_construct(const CovarianceSequence& seq, MaxTinVariant variant, std::size_t max_lag) {
  if (max_lag + 1 < seq.size()) throw InvalidInput("max_lag shorter than the prefix");
  const std::size_t m = seq.size();
  const MaMatch ma = ma_match(seq);
  const std::size_t q = ma.k - 1;
  const std::size_t d = m + q;
  auto ma_at = [&](long t) {
    const auto u = static_cast<std::size_t>(t < 0 ? -t : t);
    return u <= q ? ma.covariances[u] : 0.0;
  };

  std::vector<double> c(max_lag + 1);
  const auto dl = static_cast<long>(d);
  for (std::size_t t = 0; t <= max_lag; ++t) {
    const auto tl = static_cast<long>(t);
    if (variant == MaxTinVariant::comb) {
      c[t] = ma_at(tl) + 0.5 * (ma_at(tl - dl) + ma_at(tl + dl));
    } else {
      const long r = tl % dl;
      c[t] = ma_at(r) + ma_at(r - dl);  // only the two nearest aliases overlap the support
    }
  }
  std::copy(seq.values().begin(), seq.values().end(), c.begin());

  CompletionResult out{CompletionMethod::maxtin, CovarianceSequence(std::move(c)), std::monostate{}, {}, {}};
  out.diagnostics["ma_support"] = static_cast<double>(ma.k);
  out.diagnostics["ma_order"] = static_cast<double>(q);
  out.diagnostics["delay"] = static_cast<double>(d);
  out.diagnostics["periodic"] = variant == MaxTinVariant::periodic ? 1.0 : 0.0;
  out.series["ma_covariances"] = {ma.covariances.values().begin(), ma.covariances.values().end()};
  return out;
}

/// Spectrum of a comb MaxTin completion, sampled on the aligned grid.
inline SpectrumGrid maxtin_comb_spectrum(const CompletionResult& r, std::size_t n_grid = kDefaultGridSize) {
  if (r.method != CompletionMethod::maxtin || r.diagnostics.at("periodic") != 0.0) {
    throw InvalidInput("not a comb MaxTin completion");
  }
  const auto& ma = r.series.at("ma_covariances");
  const auto d = static_cast<std::size_t>(r.diagnostics.at("delay"));
  const std::size_t n = aligned_grid_size(d, n_grid);
  const SpectrumGrid s_ma = psd_from_finite_covariance(CovarianceSequence(ma), n);
  // 2 pi D f_k = pi (k/s - D) with s = N/(2D); zeros exactly where k/s - D is odd.
  const std::size_t s = n / (2 * d);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    double comb;
    if (k % s == 0) {
      const long j = static_cast<long>(k / s) - static_cast<long>(d);
      comb = (j % 2 != 0) ? 0.0 : 2.0;
    } else {
      comb = 1.0 + std::cos(std::numbers::pi * (static_cast<double>(k) / static_cast<double>(s) - static_cast<double>(d)));
    }
    v[k] = s_ma[k] * comb;
  }
  return SpectrumGrid(std::move(v));
}

}  // namespace tinspec
