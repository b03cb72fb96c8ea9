#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/covariance.hpp"
#include "tinspec/detail/levenberg_marquardt.hpp"
#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/rar_spectrum.hpp"
#include "tinspec/spectrum.hpp"

namespace tinspec {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct RarFitOptions {
  std::size_t n_grid = kDefaultGridSize;
  int starts_per_split = 16;  // random starts for each pair/real split of the poles
  std::uint64_t seed = kDefaultSeed;
  int max_iterations = 200;
  double tolerance = 1e-8;  // converged when ||lags - c|| < tolerance * c_0
};

struct RarFitResult {
  RarSpectrum spectrum;
  double residual_norm = 0.0;
  int iterations = 0;  // summed over all starts
  int starts = 0;
  bool converged = false;
  std::vector<RarSpectrum> optima;  // distinct converged solutions, best first
  std::vector<double> optima_residuals;
};

namespace detail {

/// Lags of a unit-gamma RAR spectrum as a function of the unconstrained
/// pole parameters: per pair (logit r, logit theta/pi), per real pole
/// atanh x.
class RarLagModel {
 public:
  RarLagModel(std::size_t n_grid, std::size_t lags, std::size_t pairs, std::size_t reals)
      : table_(n_grid), lags_(lags), pairs_(pairs), reals_(reals), cosw_(n_grid), sinw_(n_grid), s_(n_grid) {
    for (std::size_t k = 0; k < n_grid; ++k) {
      const double w = 2.0 * std::numbers::pi * SpectrumGrid::frequency_of(k, n_grid);
      cosw_[k] = std::cos(w);
      sinw_[k] = std::sin(w);
    }
  }

  std::size_t parameters() const { return 2 * pairs_ + reals_; }

  static double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
  static double clamp_modulus(double r) { return std::min(r, 1.0 - 1e-12); }

  std::vector<std::complex<double>> poles(const Eigen::VectorXd& u) const {
    std::vector<std::complex<double>> out;
    for (std::size_t j = 0; j < pairs_; ++j) {
      const double r = clamp_modulus(sigmoid(u(static_cast<Eigen::Index>(2 * j))));
      const double th = std::numbers::pi * sigmoid(u(static_cast<Eigen::Index>(2 * j + 1)));
      const auto z = std::polar(r, th);
      out.push_back(z);
      out.push_back(std::conj(z));
    }
    for (std::size_t j = 0; j < reals_; ++j) {
      const double x = std::tanh(u(static_cast<Eigen::Index>(2 * pairs_ + j)));
      out.emplace_back(std::clamp(x, -1.0 + 1e-12, 1.0 - 1e-12), 0.0);
    }
    return out;
  }

  /// g_l = integral S_{gamma=1}(f) cos(2 pi l f) df.
  std::vector<double> unit_lags(const Eigen::VectorXd& u) const {
    const std::size_t n = s_.size();
    std::vector<double> pr, pc, ps, xr;
    for (std::size_t j = 0; j < pairs_; ++j) {
      const double r = clamp_modulus(sigmoid(u(static_cast<Eigen::Index>(2 * j))));
      const double th = std::numbers::pi * sigmoid(u(static_cast<Eigen::Index>(2 * j + 1)));
      pr.push_back(r);
      pc.push_back(std::cos(th));
      ps.push_back(std::sin(th));
    }
    for (std::size_t j = 0; j < reals_; ++j) {
      xr.push_back(std::clamp(std::tanh(u(static_cast<Eigen::Index>(2 * pairs_ + j))), -1.0 + 1e-12, 1.0 - 1e-12));
    }
    for (std::size_t k = 0; k < n; ++k) {
      double den2 = 1.0;
      for (std::size_t j = 0; j < pr.size(); ++j) {
        const double r = pr[j];
        const double cm = cosw_[k] * pc[j] + sinw_[k] * ps[j];  // cos(w - theta)
        const double cp = cosw_[k] * pc[j] - sinw_[k] * ps[j];  // cos(w + theta)
        den2 *= (1.0 - 2.0 * r * cm + r * r) * (1.0 - 2.0 * r * cp + r * r);
      }
      for (double x : xr) den2 *= 1.0 - 2.0 * x * cosw_[k] + x * x;
      s_[k] = 1.0 / std::sqrt(den2);
    }
    return idtft_lags(s_, table_, lags_ - 1);
  }

 private:
  CosineTable table_;
  std::size_t lags_, pairs_, reals_;
  std::vector<double> cosw_, sinw_;
  mutable std::vector<double> s_;
};

/// Least-squares gamma for fixed poles: gamma = <g, c> / <g, g>.
inline double projected_gamma(const std::vector<double>& g, std::span<const double> c) {
  double gc = 0.0, gg = 0.0;
  for (std::size_t l = 0; l < g.size(); ++l) {
    gc += g[l] * c[l];
    gg += g[l] * g[l];
  }
  return std::max(gc / gg, 1e-300);
}

inline bool same_spectrum(const RarSpectrum& a, const RarSpectrum& b) {
  const auto pa = a.poles(), pb = b.poles();
  if (pa.poles.size() != pb.poles.size()) return false;
  if (std::abs(pa.gamma - pb.gamma) > 1e-6 * std::max(pa.gamma, pb.gamma)) return false;
  for (std::size_t k = 0; k < pa.poles.size(); ++k) {
    if (std::abs(pa.poles[k] - pb.poles[k]) > 1e-6) return false;
  }
  return true;
}

/// Lexicographic order on (gamma, re, im of canonical poles).
inline bool lexicographically_less(const RarSpectrum& a, const RarSpectrum& b) {
  const auto pa = a.poles(), pb = b.poles();
  std::vector<double> ka{pa.gamma}, kb{pb.gamma};
  for (const auto& z : pa.poles) {
    ka.push_back(z.real());
    ka.push_back(z.imag());
  }
  for (const auto& z : pb.poles) {
    kb.push_back(z.real());
    kb.push_back(z.imag());
  }
  return ka < kb;
}

}  // namespace detail

/// Fits the RAR(m-1) spectrum whose first m lags match `seq`, i.e. the
/// completion with minimal M_inf. Outer Levenberg-Marquardt over the poles
/// with gamma projected out, multistarted over every split of the m-1
/// poles into conjugate pairs and real poles.
inline RarFitResult rar_fit(const CovarianceSequence& seq, const RarFitOptions& opt = {}) {
  const std::size_t m = seq.size();
  const double c0 = seq.variance();
  {
    const ToeplitzCovariance cm(seq, m);
    if (!is_positive_definite(cm)) throw SingularMatrix("rar_fit needs a positive definite C_m");
  }
  if (m == 1) {
    auto white = RarSpectrum::from_poles(c0, {});
    return {white, 0.0, 0, 0, true, {white}, {0.0}};
  }

  const std::size_t d = m - 1;
  const auto c = seq.values();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> modulus(0.3, 0.995);
  std::uniform_real_distribution<double> angle(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto logit = [](double p) { return std::log(p / (1.0 - p)); };

  detail::LmOptions lm;
  lm.max_iterations = opt.max_iterations;
  lm.residual_target = 1e-14 * c0;

  struct Candidate {
    RarSpectrum spectrum;
    double residual;
  };
  std::vector<Candidate> candidates;
  int total_iterations = 0;
  int starts = 0;

  for (std::size_t pairs = d / 2 + 1; pairs-- > 0;) {
    const std::size_t reals = d - 2 * pairs;
    const detail::RarLagModel model(opt.n_grid, m, pairs, reals);
    auto residual = [&](const Eigen::VectorXd& u) {
      const auto g = model.unit_lags(u);
      const double gamma = detail::projected_gamma(g, c);
      Eigen::VectorXd r(static_cast<Eigen::Index>(m));
      for (std::size_t l = 0; l < m; ++l) r(static_cast<Eigen::Index>(l)) = gamma * g[l] - c[l];
      return r;
    };

    for (int s = 0; s < opt.starts_per_split; ++s) {
      Eigen::VectorXd u(static_cast<Eigen::Index>(model.parameters()));
      for (std::size_t j = 0; j < pairs; ++j) {
        u(static_cast<Eigen::Index>(2 * j)) = logit(modulus(rng));
        u(static_cast<Eigen::Index>(2 * j + 1)) = logit(std::clamp(angle(rng), 1e-3, 1.0 - 1e-3));
      }
      for (std::size_t j = 0; j < reals; ++j) {
        const double x = modulus(rng) * (coin(rng) < 0.5 ? -1.0 : 1.0);
        u(static_cast<Eigen::Index>(2 * pairs + j)) = std::atanh(x);
      }
      const auto fit = detail::levenberg_marquardt(residual, u, lm);
      total_iterations += fit.iterations;
      ++starts;
      if (!std::isfinite(fit.norm)) continue;
      const double gamma = detail::projected_gamma(model.unit_lags(fit.x), c);
      candidates.push_back({RarSpectrum::from_poles(gamma, model.poles(fit.x)), fit.norm});
    }
  }
  if (candidates.empty()) throw SolverFailure("rar_fit: no start produced a finite residual", INFINITY);

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.residual != b.residual) return a.residual < b.residual;
    return detail::lexicographically_less(a.spectrum, b.spectrum);
  });

  const double target = opt.tolerance * c0;
  RarFitResult out{candidates.front().spectrum, candidates.front().residual, total_iterations, starts,
                   candidates.front().residual < target, {}, {}};
  for (const auto& cand : candidates) {
    if (!(cand.residual < target)) break;
    const bool seen = std::any_of(out.optima.begin(), out.optima.end(),
                                  [&](const RarSpectrum& o) { return detail::same_spectrum(o, cand.spectrum); });
    if (!seen) {
      out.optima.push_back(cand.spectrum);
      out.optima_residuals.push_back(cand.residual);
    }
  }
  return out;
}

}  // namespace tinspec
