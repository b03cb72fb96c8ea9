#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/nonstationary.hpp"

using namespace tinspec;
namespace tt = tinspec::testing;
using tt::relative_error;

TEST(GeneralCovariance, Validation) {
  Eigen::Matrix2d asym;
  asym << 1.0, 0.2, 0.3, 1.0;
  EXPECT_THROW(GeneralCovariance(Eigen::MatrixXd(asym)), InvalidInput);
  Eigen::Matrix2d indefinite;
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GeneralCovariance(Eigen::MatrixXd(indefinite)), InvalidInput);
  EXPECT_THROW(GeneralCovariance(Eigen::MatrixXd(2, 3)), InvalidInput);
}

TEST(KOfN, DiagonalIsConstantInK) {
  Eigen::VectorXd v(5);
  v << 1.0, 2.0, 4.0, 0.5, 3.0;
  const GeneralCovariance c(v.asDiagonal().toDenseMatrix());
  const double want = v.cwiseInverse().mean();
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_LT(relative_error(k_of_n_tin(c, k).value(), want), 1e-14);
  EXPECT_TRUE(check_subset_monotonicity(c));
}

TEST(KOfN, TwoByTwo) {
  const double rho = 0.6;
  Eigen::Matrix2d m;
  m << 1.0, rho, rho, 1.0;
  EXPECT_NEAR(k_of_n_tin(GeneralCovariance(Eigen::MatrixXd(m)), 2).value(), 1.0 / (1.0 - rho * rho), 1e-14);
}

TEST(KOfN, MatchesBruteForce) {
  tt::Rng rng(51);
  const GeneralCovariance c(tt::random_psd(rng, 8, 12));
  EXPECT_LT(relative_error(k_of_n_tin_exact(c, 3).value(), tt::brute_k_of_n(c.matrix(), 3)), 1e-10);
}

TEST(KOfN, SingularSubsetIsInfinite) {
  tt::Rng rng(52);
  const GeneralCovariance c(tt::random_psd(rng, 6, 3));
  EXPECT_TRUE(k_of_n_tin(c, 3).is_finite());
  EXPECT_TRUE(k_of_n_tin(c, 4).is_infinite());
  EXPECT_TRUE(check_subset_monotonicity(c));
  EXPECT_THROW(k_of_n_tin(c, 0), InvalidInput);
  EXPECT_THROW(k_of_n_tin(c, 7), InvalidInput);
}

TEST(KOfN, ToeplitzDoesNotReduceToTinSequence) {
  const CovarianceSequence seq({1.0, 0.6054, 0.1324, 0.0904, 0.05});
  const GeneralCovariance c(ToeplitzCovariance(seq, 5).matrix());
  EXPECT_TRUE(check_subset_monotonicity(c));
  const auto prof = k_of_n_profile(c);
  const auto m = tin_sequence(seq, 5);
  EXPECT_LT(relative_error(prof.back().value(), m.back().value()), 1e-12);
  EXPECT_GT(std::abs(prof[1].value() - m[1].value()), 1e-3);
}

TEST(KOfN, SamplingIsUnbiased) {
  tt::Rng rng(53);
  for (int t = 0; t < 3; ++t) {
    const GeneralCovariance c(tt::random_psd(rng, 12, 20));
    const double exact = k_of_n_tin_exact(c, 5).value();
    const auto s = k_of_n_tin_sampled(c, 5, 4000, 100 + static_cast<std::uint64_t>(t));
    EXPECT_LT(std::abs(s.estimate.value() - exact), 3.0 * s.standard_error);
    EXPECT_GT(s.standard_error, 0.0);
  }
}

TEST(KOfN, SampledModeAboveCap) {
  tt::Rng rng(54);
  const GeneralCovariance c(tt::random_psd(rng, 24, 30));
  KOfNOptions opt;
  opt.samples = 200;
  EXPECT_TRUE(k_of_n_tin(c, 4, opt).is_finite());
  EXPECT_THROW(k_of_n_profile(c), InvalidInput);
}

TEST(SubsetMonotonicity, RandomMatrices) {
  tt::Rng rng(55);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = tt::uniform_size(rng, 1, 8);
    EXPECT_TRUE(check_subset_monotonicity(GeneralCovariance(tt::random_psd(rng, n, n + 2))));
  }
}

TEST(CountingIdentity, SmallN) {
  tt::Rng rng(56);
  for (std::size_t n = 2; n <= 6; ++n) {
    const GeneralCovariance c(tt::random_psd(rng, n, n + 4));
    for (std::size_t k = 1; k < n; ++k) {
      const auto id = subset_counting_identity(c, k);
      EXPECT_LT(relative_error(id.lhs, id.rhs), 1e-10);
    }
  }
}
