#include "gdps/diffusion.hpp"
#include "gdps/errors.hpp"
#include "gdps/schedule.hpp"
#include "unit/moments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gdps;

TEST(Schedule, SingleStepIdentity) {
  const Schedule s = Schedule::linear_vp(1, 0.5, 0.5);
  EXPECT_EQ(s.steps(), 1);
  EXPECT_DOUBLE_EQ(s.k(1), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(s.alpha_bar(1), 0.5);
}

TEST(Schedule, TwoStepProduct) {
  const Schedule s = Schedule::from_betas({0.1, 0.2});
  EXPECT_NEAR(s.alpha_bar(2), 0.72, 1e-15);
  EXPECT_NEAR(terminal_gap(Schedule::from_betas({0.5, 0.5})), 0.25, 1e-15);
  EXPECT_NEAR(terminal_gap(Schedule::from_betas({0.999})), 0.001, 1e-15);
}

TEST(Schedule, DefaultMatchesCumulativeProductOracle) {
  const Schedule s =
      Schedule::linear_vp(kDefaultSteps, kDefaultBetaMin, kDefaultBetaMax);
  // independent product over explicitly interpolated betas
  long double product = 1.0L;
  for (int t = 1; t <= 50; ++t) {
    const long double beta =
        1e-4L + (0.3L - 1e-4L) * (long double)(t - 1) / 49.0L;
    product *= (1.0L - beta);
  }
  EXPECT_NEAR(s.alpha_bar(50) / double(product), 1.0, 1e-12);
  EXPECT_LT(terminal_gap(s), 0.05);
}

TEST(Schedule, InvariantsHold) {
  const Schedule s = Schedule::linear_vp(50, 1e-4, 0.3);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  for (int t = 1; t <= s.steps(); ++t) {
    EXPECT_LT(std::abs(s.k(t) * s.k(t) + s.beta(t) - 1.0), 1e-14);
    EXPECT_EQ(s.alpha_bar(t), s.alpha_bar(t - 1) * (1.0 - s.beta(t)));
    EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
    EXPECT_GT(s.beta(t), 0.0);
  }
  for (int t = 0; t < s.steps(); ++t)
    EXPECT_GT(s.v_back(t), 0.0);
}

TEST(Schedule, BackwardVarianceFormula) {
  const Schedule s = Schedule::from_betas({0.1, 0.2, 0.3});
  EXPECT_DOUBLE_EQ(s.v_back(0), 0.1);
  const double ab1 = 0.9, ab2 = 0.9 * 0.8;
  EXPECT_NEAR(s.v_back(1), 0.2 * (1 - ab1) / (1 - ab2), 1e-15);
}

TEST(Schedule, RejectsInvalidRanges) {
  EXPECT_THROW(Schedule::linear_vp(0, 0.1, 0.2), ParameterError);
  EXPECT_THROW(Schedule::linear_vp(10, 0.0, 0.2), ParameterError);
  EXPECT_THROW(Schedule::linear_vp(10, 0.3, 0.2), ParameterError);
  EXPECT_THROW(Schedule::linear_vp(10, 0.1, 1.0), ParameterError);
  EXPECT_THROW(Schedule::from_betas({0.5, 1.5}), ParameterError);
  const Schedule s = Schedule::from_betas({0.1});
  EXPECT_THROW(s.beta(0), ParameterError);
  EXPECT_THROW(s.v_back(1), ParameterError);
}

TEST(Schedule, ForwardMarginalConsistency) {
  const Schedule s = Schedule::linear_vp(20, 1e-3, 0.3);
  const double m = 0.7, sigma2 = 0.2;
  const int n = 20000;
  Rng rng(11);
  std::normal_distribution<double> prior(m, std::sqrt(sigma2));
  for (int t : {1, 7, 20}) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
      ImageField x(1, 1, prior(rng));
      for (int u = 1; u <= t; ++u)
        x = forward_step(s, u, x, rng);
      xs.push_back(x(0, 0));
    }
    const auto mo = test::moments(xs);
    const double ab = s.alpha_bar(t);
    EXPECT_LT(std::abs(mo.mean - std::sqrt(ab) * m), 5 * mo.mean_se());
    const double var = ab * sigma2 + 1 - ab;
    EXPECT_LT(std::abs(mo.variance - var), 5 * var * std::sqrt(2.0 / n));
  }
}
