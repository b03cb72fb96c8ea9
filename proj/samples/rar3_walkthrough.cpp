#include <complex>
#include <cstdio>
#include <numbers>

#include "tinspec/tinspec.hpp"

// Three-pole RAR process: its first lags, the fit that recovers it, and
// how three completions of the lags trade off 1/M_n.
int main() {
  using namespace tinspec;
  const double pi = std::numbers::pi;

  const auto xi = std::polar(0.97, 0.4 * pi);
  const auto unit = RarSpectrum::from_poles(1.0, {xi, std::conj(xi), {0.99, 0.0}});
  const auto spec = with_power(unit, 1.0);
  const auto lags = idtft_covariances(psd_rar(spec), 3);

  std::printf("gamma = %.6f\n", spec.poles().gamma);
  std::printf("c     = %.6f %.6f %.6f %.6f\n", lags[0], lags[1], lags[2], lags[3]);

  const auto fit = rar_fit(lags);
  std::printf("\nfit residual %.2e after %d starts\n", fit.residual_norm, fit.starts);
  for (const auto& z : fit.spectrum.poles().poles) {
    std::printf("  pole  |xi| = %.6f  arg = %+.6f pi\n", std::abs(z), std::arg(z) / pi);
  }

  // Extend the four lags three ways and compare 1/M_n.
  const std::size_t max_lag = 64;
  const auto maxent = maxent_extend(lags, max_lag);
  const auto greedy = greedy_mintin_extend(lags, max_lag);
  const auto rar = rar_extend(lags, max_lag);
  const auto tm = tin_sequence(maxent.covariances, max_lag + 1);
  const auto tg = tin_sequence(greedy.covariances, max_lag + 1);
  const auto tr = tin_sequence(rar.covariances, max_lag + 1);

  std::printf("\n%4s %10s %10s %10s\n", "n", "maxent", "greedy", "rar");
  for (std::size_t n : {1, 2, 4, 5, 6, 8, 12, 16, 32, 65}) {
    std::printf("%4zu %10.6f %10.6f %10.6f\n", n, tm[n - 1].reciprocal(), tg[n - 1].reciprocal(),
                tr[n - 1].reciprocal());
  }
  std::printf("%4s %10.6f %10s %10.6f\n", "inf", m_infinity(psd_from_ar(std::get<ArModel>(maxent.model))).reciprocal(),
              "", m_infinity(psd_rar(std::get<RarSpectrum>(rar.model))).reciprocal());
  return 0;
}
