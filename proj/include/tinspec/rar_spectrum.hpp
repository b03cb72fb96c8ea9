#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tinspec/detail/numeric.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/spectrum.hpp"

namespace tinspec {

/// Root-AR spectrum of order d = m - 1, in either of two equivalent forms:
///   coefficients: S(f) = 1 / sqrt(sum_{l<=d} lambda_l cos(2 pi l f))
///   poles:        S(f) = gamma / prod_k |1 - xi_k e^{-j 2 pi f}|
class RarSpectrum {
 public:
  struct Poles {
    double gamma;
    std::vector<std::complex<double>> poles;
  };
  struct Coefficients {
    std::vector<double> lambda;
  };

  /// Poles must lie strictly inside the unit disk; complex poles must come
  /// with their conjugates. Poles are stored in a canonical order.
  static RarSpectrum from_poles(double gamma, std::vector<std::complex<double>> poles) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("RAR gamma must be positive");
    for (const auto& z : poles) {
      if (!(std::abs(z) < 1.0)) throw InvalidInput("RAR pole outside the open unit disk");
    }
    canonicalize(poles);
    for (std::size_t k = 0; k < poles.size(); ++k) {
      if (poles[k].imag() > 0.0) {
        if (k + 1 >= poles.size() || std::abs(poles[k + 1] - std::conj(poles[k])) > 1e-9) {
          throw InvalidInput("complex RAR poles must come in conjugate pairs");
        }
        poles[k + 1] = std::conj(poles[k]);
        ++k;
      } else if (poles[k].imag() < 0.0) {
        throw InvalidInput("complex RAR poles must come in conjugate pairs");
      }
    }
    return RarSpectrum(Poles{gamma, std::move(poles)});
  }

  /// The cosine polynomial must be positive; checked on a 4096-point grid.
  static RarSpectrum from_coefficients(std::vector<double> lambda) {
    if (lambda.empty()) throw InvalidInput("RAR needs at least lambda_0");
    const auto q = detail::cosine_polynomial_on_grid(lambda, 4096);
    if (*std::min_element(q.begin(), q.end()) <= 0.0) {
      throw InvalidInput("RAR cosine polynomial is not positive");
    }
    return RarSpectrum(Coefficients{std::move(lambda)});
  }

  bool has_pole_form() const { return std::holds_alternative<Poles>(form_); }

  /// RAR order d (the number of poles, or the cosine degree).
  std::size_t order() const {
    return has_pole_form() ? std::get<Poles>(form_).poles.size() : std::get<Coefficients>(form_).lambda.size() - 1;
  }

  /// lambda_l from the pole form: |P(e^{jw})|^2 / gamma^2 with
  /// P(z) = prod_k (1 - xi_k z^{-1}), projected on cosines.
  Coefficients coefficients() const {
    if (!has_pole_form()) return std::get<Coefficients>(form_);
    const auto& pf = std::get<Poles>(form_);
    std::vector<std::complex<double>> p{1.0};
    for (const auto& z : pf.poles) {
      std::vector<std::complex<double>> next(p.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) {
        next[i] += p[i];
        next[i + 1] -= z * p[i];
      }
      p = std::move(next);
    }
    const std::size_t d = pf.poles.size();
    std::vector<double> lambda(d + 1, 0.0);
    const double g2 = pf.gamma * pf.gamma;
    for (std::size_t l = 0; l <= d; ++l) {
      double r = 0.0;
      for (std::size_t i = 0; i + l <= d; ++i) r += p[i].real() * p[i + l].real();
      lambda[l] = (l == 0 ? r : 2.0 * r) / g2;
    }
    return {std::move(lambda)};
  }

  /// Pole form from the coefficients by factoring the Laurent polynomial
  /// z^d sum_l lambda_l (z^l + z^-l)/2 and keeping the roots inside the
  /// unit circle. A vanishing top coefficient yields poles at zero.
  Poles poles() const {
    if (has_pole_form()) return std::get<Poles>(form_);
    const auto& lambda = std::get<Coefficients>(form_).lambda;
    const std::size_t d = lambda.size() - 1;
    std::size_t deg = d;
    const double scale = std::abs(lambda[0]);
    while (deg > 0 && std::abs(lambda[deg]) <= 1e-14 * scale) --deg;

    std::vector<std::complex<double>> inside;
    if (deg > 0) {
      // coefficients of z^{2 deg}, ..., z^0 (symmetric)
      const auto n = static_cast<Eigen::Index>(2 * deg);
      std::vector<double> poly(2 * deg + 1);
      for (std::size_t l = 0; l <= deg; ++l) {
        const double c = (l == 0) ? lambda[0] : 0.5 * lambda[l];
        poly[deg + l] = c;
        poly[deg - l] = c;
      }
      Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -poly[static_cast<std::size_t>(j + 1)] / poly[0];
      for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
      Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
      for (Eigen::Index i = 0; i < n; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z) < 1.0) inside.push_back(z);
      }
      if (inside.size() != deg) throw NumericalDegeneracy("RAR coefficient polynomial has roots on the unit circle");
      for (auto& z : inside) {
        if (std::abs(z.imag()) < 1e-10) z = {z.real(), 0.0};
      }
    }
    inside.resize(d, 0.0);
    canonicalize(inside);
    for (std::size_t k = 0; k + 1 < inside.size(); ++k) {
      if (inside[k].imag() > 0.0) {
        inside[k + 1] = std::conj(inside[k]);
        ++k;
      }
    }
    // gamma^2 = |P(1)|^2 / sum_l lambda_l   (evaluate at f = 0)
    std::complex<double> p1 = 1.0;
    for (const auto& z : inside) p1 *= (1.0 - z);
    double q0 = 0.0;
    for (double v : lambda) q0 += v;
    return {std::abs(p1) / std::sqrt(q0), std::move(inside)};
  }

  /// S at one frequency.
  double operator()(double f) const {
    const double w = 2.0 * std::numbers::pi * f;
    if (has_pole_form()) {
      const auto& pf = std::get<Poles>(form_);
      double den = 1.0;
      for (const auto& z : pf.poles) den *= std::abs(1.0 - z * std::polar(1.0, -w));
      return pf.gamma / den;
    }
    const auto& lambda = std::get<Coefficients>(form_).lambda;
    double q = 0.0;
    for (std::size_t l = 0; l < lambda.size(); ++l) q += lambda[l] * std::cos(w * static_cast<double>(l));
    if (q <= 0.0) throw InvalidInput("RAR cosine polynomial is not positive");
    return 1.0 / std::sqrt(q);
  }

  /// Same spectrum with gamma (pole form) or lambda (coefficient form)
  /// rescaled so that S is multiplied by `factor`.
  RarSpectrum scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidInput("scale factor must be positive");
    if (has_pole_form()) {
      auto pf = std::get<Poles>(form_);
      pf.gamma *= factor;
      return RarSpectrum(std::move(pf));
    }
    auto cf = std::get<Coefficients>(form_);
    for (double& v : cf.lambda) v /= factor * factor;
    return RarSpectrum(std::move(cf));
  }

  /// Sort: real poles first by value descending, then complex pairs by
  /// modulus descending, upper-half-plane member first.
  static void canonicalize(std::vector<std::complex<double>>& poles) {
    std::sort(poles.begin(), poles.end(), [](const auto& a, const auto& b) {
      const bool ra = a.imag() == 0.0;
      const bool rb = b.imag() == 0.0;
      if (ra != rb) return ra;
      if (ra) return a.real() > b.real();
      const double ma = std::abs(a), mb = std::abs(b);
      if (ma != mb) return ma > mb;
      const double aa = std::abs(std::arg(a)), ab = std::abs(std::arg(b));
      if (aa != ab) return aa < ab;
      return a.imag() > b.imag();
    });
  }

 private:
  explicit RarSpectrum(Poles p) : form_(std::move(p)) {}
  explicit RarSpectrum(Coefficients c) : form_(std::move(c)) {}

  std::variant<Poles, Coefficients> form_;
};

/// Samples a RAR spectrum. Pole form uses the product of pole moduli;
/// coefficient form requires the cosine polynomial positive on the grid.
inline SpectrumGrid psd_rar(const RarSpectrum& spec, std::size_t n_grid = kDefaultGridSize) {
  if (spec.has_pole_form()) {
    return SpectrumGrid::evaluate(n_grid, [&spec](double f) { return spec(f); });
  }
  auto q = detail::cosine_polynomial_on_grid(spec.coefficients().lambda, n_grid);
  for (double& v : q) {
    if (v <= 0.0) throw InvalidInput("RAR cosine polynomial is not positive on the grid");
    v = 1.0 / std::sqrt(v);
  }
  return SpectrumGrid(std::move(q));
}

/// Rescales a RAR spectrum to the given power c_0 (quadrature on n_grid).
inline RarSpectrum with_power(const RarSpectrum& spec, double power, std::size_t n_grid = kDefaultGridSize) {
  return spec.scaled(power / psd_rar(spec, n_grid).mean());
}

}  // namespace tinspec
