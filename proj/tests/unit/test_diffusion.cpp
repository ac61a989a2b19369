#include "gdps/diffusion.hpp"
#include "unit/moments.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace gdps;

TEST(ForwardStep, NoiselessLimit) {
  const Schedule s = Schedule::from_betas({1e-300});
  Rng rng(1);
  const ImageField x(2, 2, 0.75);
  EXPECT_LT((forward_step(s, 1, x, rng).data() - s.k(1) * x.data())
                .cwiseAbs()
                .maxCoeff(),
            1e-100);
}

TEST(ForwardStep, DeterministicAndMoments) {
  const Schedule s = Schedule::from_betas({0.2, 0.35});
  const ImageField x(100, 100, 0.6);
  Rng a(5), b(5);
  EXPECT_EQ(forward_step(s, 2, x, a).data(), forward_step(s, 2, x, b).data());

  Rng rng(6);
  const Vector draws = forward_step(s, 2, x, rng).data();
  const std::vector<double> xs(draws.begin(), draws.end());
  const auto m = test::moments(xs);
  EXPECT_LT(std::abs(m.mean - s.k(2) * 0.6), 5 * m.mean_se());
  EXPECT_LT(std::abs(m.variance - 0.35), 5 * 0.35 * std::sqrt(2.0 / xs.size()));
}

TEST(ForwardTrajectory, DegenerateChain) {
  Rng rng(1);
  const ImageField x0(3, 3, 0.2);
  const ChainState c = forward_trajectory(Schedule::from_betas({}), x0, rng);
  ASSERT_EQ(c.levels.size(), 1u);
  EXPECT_EQ(c[0].data(), x0.data());
}

TEST(ForwardTrajectory, MarginalMatchesClosedForm) {
  const Schedule s = Schedule::linear_vp(12, 0.01, 0.3);
  Rng rng(8);
  const int n = 10000;
  std::vector<double> x5, xT;
  const ImageField x0(1, 1, 0.8);
  for (int i = 0; i < n; ++i) {
    const ChainState c = forward_trajectory(s, x0, rng);
    x5.push_back(c[5](0, 0));
    xT.push_back(c[12](0, 0));
  }
  for (auto [t, xs] : {std::pair{5, &x5}, std::pair{12, &xT}}) {
    const auto m = test::moments(*xs);
    const double ab = s.alpha_bar(t);
    EXPECT_LT(std::abs(m.mean - std::sqrt(ab) * 0.8), 5 * m.mean_se());
    EXPECT_LT(std::abs(m.variance - (1 - ab)),
              5 * (1 - ab) * std::sqrt(2.0 / n));
  }
}

TEST(ForwardTrajectory, TerminalIsNearStandardNormal) {
  const Schedule s =
      Schedule::linear_vp(kDefaultSteps, kDefaultBetaMin, kDefaultBetaMax);
  ASSERT_LT(terminal_gap(s), 0.05);
  Rng rng(9);
  const ImageField x0(100, 100, standard_normal(10000, rng));
  const Vector xT = forward_trajectory(s, x0, rng)[s.steps()].data();
  const auto m = test::moments({xT.begin(), xT.end()});
  EXPECT_LT(std::abs(m.mean), 5 * m.mean_se());
  EXPECT_LT(std::abs(m.variance - 1.0), 5 * m.variance_se());
}

namespace {

std::vector<double> ancestral_x0(const Schedule &s, const Denoiser &d, int n,
                                 std::uint64_t seed) {
  // n draws at once: pixels of one image are independent chains
  Rng rng(seed);
  const int side = int(std::sqrt(double(n)));
  const Vector x0 = ancestral_sample(s, d, side, n / side, rng)[0].data();
  return {x0.begin(), x0.end()};
}

} // namespace

TEST(AncestralSample, SingleStepUnitPrior) {
  const Schedule s = Schedule::from_betas({0.6});
  GaussianPriorDenoiser d({ImageField(100, 100, 0.0), 1.0}, s);
  const auto m = test::moments(ancestral_x0(s, d, 10000, 3));
  EXPECT_LT(std::abs(m.mean), 5 * m.mean_se());
  EXPECT_LT(std::abs(m.variance - 1.0), 5 * m.variance_se());
}

TEST(AncestralSample, Deterministic) {
  const Schedule s = Schedule::linear_vp(8, 0.01, 0.3);
  GaussianPriorDenoiser d({ImageField(4, 4, 0.2), 0.5}, s);
  Rng a(17), b(17);
  const auto ca = ancestral_sample(s, d, 4, 4, a);
  const auto cb = ancestral_sample(s, d, 4, 4, b);
  for (int t = 0; t <= 8; ++t)
    EXPECT_EQ(ca[t].data(), cb[t].data());
}

TEST(AncestralSample, ReproducesGaussianPrior) {
  const Schedule s =
      Schedule::linear_vp(kDefaultSteps, kDefaultBetaMin, kDefaultBetaMax);
  const double m0 = 0.5, s0sq = 0.04;
  GaussianPriorDenoiser d({ImageField(100, 100, m0), s0sq}, s);
  const auto m = test::moments(ancestral_x0(s, d, 10000, 4));
  EXPECT_LT(std::abs(m.mean - m0), 5 * m.mean_se());
  EXPECT_LT(std::abs(m.variance - s0sq), 5 * m.variance_se());
}

TEST(AncestralSample, JointLawAgreesWithForwardChain) {
  const Schedule s =
      Schedule::linear_vp(kDefaultSteps, kDefaultBetaMin, kDefaultBetaMax);
  const double m0 = 0.3, s0sq = 0.5;
  const GaussianPrior prior{ImageField(100, 100, m0), s0sq};
  GaussianPriorDenoiser d(prior, s);
  Rng rng(12);
  const int t = 20;
  const ChainState back = ancestral_sample(s, d, 100, 100, rng);
  const ChainState fwd = forward_trajectory(s, draw_prior(prior, rng), rng);
  auto cross = [&](const ChainState &c) {
    const Vector &a = c[t].data();
    const Vector &b = c[t + 1].data();
    return std::array<double, 3>{
        test::moments({a.begin(), a.end()}).variance,
        test::covariance({a.begin(), a.end()}, {b.begin(), b.end()}),
        test::moments({b.begin(), b.end()}).variance};
  };
  const auto cb = cross(back), cf = cross(fwd);
  const double n = 10000;
  // Var of the sample covariance for Gaussians: (s_aa s_bb + s_ab^2) / n
  const double se_aa = cf[0] * std::sqrt(2 / n);
  const double se_ab = std::sqrt((cf[0] * cf[2] + cf[1] * cf[1]) / n);
  const double se_bb = cf[2] * std::sqrt(2 / n);
  EXPECT_LT(std::abs(cb[0] - cf[0]), 5 * std::sqrt(2.0) * se_aa);
  EXPECT_LT(std::abs(cb[1] - cf[1]), 5 * std::sqrt(2.0) * se_ab);
  EXPECT_LT(std::abs(cb[2] - cf[2]), 5 * std::sqrt(2.0) * se_bb);
}
