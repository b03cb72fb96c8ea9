#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "scan.hpp"
#include "tinspec/completion.hpp"
#include "tinspec/errors.hpp"

using namespace tinspec;
namespace tt = tinspec::testing;

namespace {

const CovarianceSequence kExample({1.0, 0.6054, 0.1324, 0.0904});

}  // namespace

TEST(MaxentNext, Examples) {
  EXPECT_EQ(maxent_next(tt::white(2.0, 4)), 0.0);
  EXPECT_NEAR(maxent_next(CovarianceSequence({1.0, 0.5})), 0.25, 1e-15);
  EXPECT_NEAR(maxent_next(kExample), maxent_extend(kExample, 10).covariances[4], 1e-15);
  EXPECT_THROW(maxent_next(CovarianceSequence({1.0, 1.0})), SingularMatrix);
}

TEST(MintinNext, Ar1WorkedCase) {
  const CovarianceSequence c({1.0, 0.5});
  const double v = mintin_next(c);
  EXPECT_NEAR(v, 0.25 + (5.0 - std::sqrt(24.0)) * 0.75, 1e-14);
  EXPECT_NEAR(v, 0.32577, 1e-5);
  const auto [lo, hi] = tt::admissible_interval(c);
  EXPECT_NEAR(tt::scan_argmax([&](double x) { return tt::fitted_tsp(c, x); }, lo, hi, 2000), v, 1e-6);
}

TEST(MintinNext, DegenerateOrderEqualsMaxent) {
  const auto c = ar_autocovariance(ArModel({1.0, -0.5}, 0.75), 2);
  EXPECT_EQ(mintin_next(c), maxent_next(c));
}

TEST(MintinNext, ExampleMinimisesTin) {
  const double v = mintin_next(kExample);
  const auto [lo, hi] = tt::admissible_interval(kExample);
  EXPECT_NEAR(tt::scan_argmax([&](double x) { return -tt::extended_trace(kExample, x); }, lo, hi, 2000), v, 1e-6);
  EXPECT_NEAR(v, greedy_mintin_extend(kExample, 4).covariances[4], 1e-12);
}

TEST(MintinNext, SingleLagIsZero) { EXPECT_EQ(mintin_next(CovarianceSequence({3.0})), 0.0); }

TEST(MintinNext, SingularPrefix) { EXPECT_THROW(mintin_next(CovarianceSequence({1.0, 1.0})), SingularMatrix); }

TEST(MintinStep, AppendsAndFits) {
  const auto r = mintin_step(kExample);
  EXPECT_EQ(r.method, CompletionMethod::mintin_step);
  ASSERT_EQ(r.covariances.size(), 5u);
  EXPECT_EQ(r.covariances[4], mintin_next(kExample));
  EXPECT_EQ(std::get<ArModel>(r.model).order(), 4u);
}

TEST(TinOracle, WhiteAndIdentity) {
  EXPECT_DOUBLE_EQ(mintin_step_tin_oracle(tt::white(2.0, 3), 0.0).value(), 0.5);
  tt::Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto seq = tt::random_pd_prefix(rng, tt::uniform_size(rng, 1, 8));
    const double x = mintin_next(seq);
    const std::size_t n = seq.size() + 1;
    EXPECT_LT(tt::relative_error(mintin_step_tin_oracle(seq, x).value(), tt::extended_trace(seq, x) / static_cast<double>(n)), 1e-10);
    EXPECT_TRUE(mintin_step_tin_oracle(seq, 10.0 * seq.variance()).is_infinite());
  }
}

TEST(TinOracle, ClosedFormIsScanMinimum) {
  tt::Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const auto seq = tt::random_pd_prefix(rng, tt::uniform_size(rng, 2, 6));
    const auto best = mintin_step_tin_oracle(seq, mintin_next(seq));
    const auto [lo, hi] = tt::admissible_interval(seq);
    for (int i = 1; i < 500; ++i) {
      const auto m = mintin_step_tin_oracle(seq, lo + (hi - lo) * i / 500.0);
      EXPECT_GE(m.to_double(), best.value() * (1.0 - 1e-12));
    }
  }
}

TEST(Greedy, WhiteGivesZeros) {
  const auto r = greedy_mintin_extend(tt::white(1.5, 3), 12);
  for (std::size_t l = 1; l <= 12; ++l) EXPECT_EQ(r.covariances[l], 0.0);
}

TEST(Greedy, MatchesRepeatedDenseSteps) {
  tt::Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    const auto seq = tt::random_pd_prefix(rng, tt::uniform_size(rng, 1, 5));
    const auto r = greedy_mintin_extend(seq, 15);
    CovarianceSequence dense = seq;
    while (dense.size() < 16) dense = CovarianceSequence(tt::with_next(dense, mintin_next(dense)));
    for (std::size_t l = 0; l < 16; ++l) EXPECT_NEAR(r.covariances[l], dense[l], 1e-9 * seq.variance());
    EXPECT_TRUE(is_admissible(r.covariances));
  }
}

TEST(Greedy, BeatsMaxentAtNextOrder) {
  tt::Rng rng(44);
  for (int t = 0; t < 50; ++t) {
    const auto seq = tt::random_pd_prefix(rng, tt::uniform_size(rng, 2, 8));
    const std::size_t n = seq.size() + 1;
    const auto g = tin_sequence(greedy_mintin_extend(seq, n - 1).covariances, n);
    const auto m = tin_sequence(maxent_extend(seq, n - 1).covariances, n);
    EXPECT_LE(g.back().value(), m.back().value() * (1.0 + 1e-12));
  }
}

TEST(MaxentExtend, KeepsPrefixAndPredictionError) {
  const auto r = maxent_extend(kExample, 20);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(r.covariances[l], kExample[l]);
  const double sigma = std::get<ArModel>(r.model).sigma_w2();
  for (std::size_t p = 3; p <= 20; ++p) {
    EXPECT_LT(tt::relative_error(yule_walker_fit(r.covariances.prefix(p + 1)).sigma_w2(), sigma), 1e-9);
  }
  EXPECT_THROW(maxent_extend(kExample, 2), InvalidInput);
}

TEST(MaMatch, White) {
  const auto r = ma_match(tt::white(2.0, 4));
  EXPECT_EQ(r.k, 4u);
  EXPECT_EQ(r.covariances[0], 2.0);
  for (std::size_t l = 1; l < r.covariances.size(); ++l) EXPECT_EQ(r.covariances[l], 0.0);
}

TEST(MaMatch, PrefixExactAndSpectrumNonnegative) {
  for (const auto& seq : {CovarianceSequence({1.0, 0.5}), kExample}) {
    const auto r = ma_match(seq);
    EXPECT_EQ(r.covariances.size(), r.k);
    for (std::size_t l = 0; l < seq.size(); ++l) EXPECT_EQ(r.covariances[l], seq[l]);
    const auto s = psd_from_finite_covariance(r.covariances);
    EXPECT_GE(s.min(), -1e-12 * *std::max_element(s.values().begin(), s.values().end()));
    EXPECT_TRUE(is_admissible(r.covariances));
  }
}

TEST(MaMatch, SingularPrefix) { EXPECT_THROW(ma_match(CovarianceSequence({1.0, 1.0})), SingularMatrix); }

TEST(MaxTin, WhiteCombPattern) {
  const std::size_t m = 3;
  const auto r = maxtin_construct(tt::white(2.0, m), MaxTinVariant::comb, 12);
  const auto d = static_cast<std::size_t>(r.diagnostics.at("delay"));
  EXPECT_EQ(d, 2 * m - 1);
  for (std::size_t l = 0; l <= 12; ++l) EXPECT_EQ(r.covariances[l], l == 0 ? 2.0 : (l == d ? 1.0 : 0.0));
  const auto m_n = tin_sequence(r.covariances, 13);
  EXPECT_GT(m_n.back().value(), m_n.front().value());
}

TEST(MaxTin, ExampleCombHasSpectralZeros) {
  const auto r = maxtin_construct(kExample, MaxTinVariant::comb, 64);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(r.covariances[l], kExample[l]);
  const auto s = maxtin_comb_spectrum(r);
  EXPECT_LT(s.min(), 1e-12 * s.mean());
  EXPECT_TRUE(m_infinity(s).is_infinite());
  EXPECT_NEAR(s.mean(), 1.0, 1e-12);
  // the comb spectrum integrates back to the constructed lags
  const auto c = idtft_covariances(s, 64);
  for (std::size_t l = 0; l <= 64; ++l) EXPECT_NEAR(c[l], r.covariances[l], 1e-12);
}

TEST(MaxTin, CombTinGrows) {
  const auto r = maxtin_construct(kExample, MaxTinVariant::comb, 400);
  const auto m = tin_sequence(r.covariances, 401);
  for (std::size_t n = 1; n < m.size(); ++n) EXPECT_GE(m[n], m[n - 1]);
  EXPECT_GT(m[400].value(), 5.0 * m[40].value());
}

TEST(MaxTin, PeriodicBecomesSingular) {
  const auto r = maxtin_construct(kExample, MaxTinVariant::periodic, 40);
  const auto p = static_cast<std::size_t>(r.diagnostics.at("delay"));
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(r.covariances[l], kExample[l]);
  for (std::size_t l = 0; l + p <= 40; ++l) EXPECT_EQ(r.covariances[l], r.covariances[l + p]);
  const auto m = tin_sequence(r.covariances, p + 1);
  EXPECT_TRUE(m[p - 1].is_finite());
  EXPECT_TRUE(m[p].is_infinite());
}

TEST(MaxTin, AlignedGrid) {
  EXPECT_EQ(aligned_grid_size(5, 16384), 16390u);
  EXPECT_EQ(aligned_grid_size(8, 16384), 16384u);
  EXPECT_THROW(aligned_grid_size(0, 16), InvalidInput);
}

TEST(CompletionMethod, Names) {
  EXPECT_EQ(parse_completion_method("mintin-greedy"), CompletionMethod::mintin_greedy);
  EXPECT_EQ(parse_completion_method("mintin_rar"), CompletionMethod::mintin_rar);
  EXPECT_FALSE(parse_completion_method("burg").has_value());
  EXPECT_EQ(to_string(CompletionMethod::maxtin), "maxtin");
}
