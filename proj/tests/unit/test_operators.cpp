#include "gdps/errors.hpp"
#include "gdps/operators.hpp"
#include "gdps/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gdps;

namespace {

ImageField random_image(int h, int w, Rng &rng) {
  return ImageField(h, w, standard_normal(Eigen::Index(h) * w, rng));
}

const Kernel kSkewed = {{0.05, 0.10, 0.00}, {0.20, 0.30, 0.05}, {0.00, 0.15, 0.15}};

std::vector<LinearOperator> all_operators(int h, int w) {
  return {LinearOperator::identity(h, w),
          LinearOperator::convolution(h, w, uniform_psf(3)),
          LinearOperator::convolution(h, w, kSkewed),
          LinearOperator::convolution(h, w, {{0.25, 0.75}}),
          LinearOperator::mask(h, w, {0, 5, 7, 19, 33, Eigen::Index(h) * w - 1})};
}

} // namespace

TEST(Operators, IdentityReturnsInput) {
  Rng rng(1);
  const auto x = random_image(4, 5, rng);
  const auto op = LinearOperator::identity(4, 5);
  EXPECT_EQ(op.apply(x), x.data());
  EXPECT_EQ(op.adjoint(x.data()).data(), x.data());
}

TEST(Operators, UniformBlurPreservesConstants) {
  const auto op = LinearOperator::convolution(8, 8, uniform_psf(3));
  const ImageField c(8, 8, 0.37);
  EXPECT_LT((op.apply(c).array() - 0.37).abs().maxCoeff(), 1e-15);
}

TEST(Operators, ConvolutionMatchesDenseCirculantOnOneHot) {
  const auto psf = uniform_psf(3);
  const auto op = LinearOperator::convolution(8, 8, psf);
  const Eigen::MatrixXd H = oracle::dense_circulant(8, 8, psf);
  for (Eigen::Index i : {0, 9, 27, 63}) {
    ImageField e(8, 8);
    e.data()[i] = 1.0;
    EXPECT_LT((op.apply(e) - H * e.data()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Operators, AdjointExamples) {
  Rng rng(2);
  const auto sym = LinearOperator::convolution(6, 7, uniform_psf(3));
  const auto u = random_image(6, 7, rng);
  EXPECT_LT((sym.adjoint(u.data()).data() - sym.apply(u)).cwiseAbs().maxCoeff(),
            1e-12);

  const auto mask = LinearOperator::mask(3, 3, {1, 4, 8});
  Vector y(3);
  y << 2.0, -1.0, 5.0;
  Vector expected = Vector::Zero(9);
  expected[1] = 2.0;
  expected[4] = -1.0;
  expected[8] = 5.0;
  EXPECT_EQ(mask.adjoint(y).data(), expected);
  EXPECT_EQ(mask.range_size(), 3);
}

TEST(Operators, AdjointConsistencyOnRandomPairs) {
  Rng rng(3);
  for (const auto &op : all_operators(8, 6)) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto u = random_image(8, 6, rng);
      const Vector v = standard_normal(op.range_size(), rng);
      const double lhs = op.apply(u).dot(v);
      const double rhs = u.data().dot(op.adjoint(v).data());
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * u.data().norm() * v.norm());
    }
  }
}

TEST(Operators, TransferRouteMatchesDenseCirculant) {
  Rng rng(4);
  for (const Kernel &psf : {uniform_psf(3), kSkewed, Kernel{{0.25, 0.75}}}) {
    const auto op = LinearOperator::convolution(8, 8, psf);
    const Eigen::MatrixXd H = oracle::dense_circulant(8, 8, psf);
    Fft2d fft(8, 8);
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_image(8, 8, rng);
      const Vector dense = H * x.data();
      EXPECT_LE((apply_via_transfer(op, x, fft) - dense).norm(),
                1e-10 * dense.norm());
      EXPECT_LE((op.apply(x) - dense).norm(), 1e-10 * dense.norm());
    }
  }
}

TEST(Operators, TransferOfRealPsfIsHermitian) {
  const int h = 8, w = 6;
  const auto op = LinearOperator::convolution(h, w, kSkewed);
  const auto &tf = op.transfer();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const auto a = tf[std::size_t(r * w + c)];
      const auto b = tf[std::size_t(((h - r) % h) * w + (w - c) % w)];
      EXPECT_LT(std::abs(a - std::conj(b)), 1e-14);
    }
  EXPECT_FALSE(LinearOperator::mask(h, w, {0}).has_transfer());
}

TEST(Operators, ShapeMismatchIsDimensionError) {
  const auto op = LinearOperator::convolution(8, 8, uniform_psf(3));
  EXPECT_THROW(op.apply(ImageField(8, 7)), DimensionError);
  EXPECT_THROW(op.adjoint(Vector::Zero(63)), DimensionError);
  EXPECT_THROW(LinearOperator::mask(2, 2, {4}), DimensionError);
  EXPECT_THROW(LinearOperator::mask(2, 2, {1, 1}), ParameterError);
  EXPECT_THROW(LinearOperator::convolution(2, 2, uniform_psf(3)),
               DimensionError);
  EXPECT_THROW(LinearOperator::convolution(4, 4, {{1.0}, {1.0, 2.0}}),
               ParameterError);
}

TEST(Operators, SimulateNoiselessAndDeterministic) {
  Rng rng(5);
  const auto op = LinearOperator::convolution(8, 8, uniform_psf(3));
  const auto x = random_image(8, 8, rng);
  EXPECT_EQ(simulate_measurement(op, x, NoiseModel{0.0}, 9u), op.apply(x));
  EXPECT_EQ(simulate_measurement(op, x, NoiseModel{0.01}, 42u),
            simulate_measurement(op, x, NoiseModel{0.01}, 42u));
  EXPECT_NE(simulate_measurement(op, x, NoiseModel{0.01}, 42u),
            simulate_measurement(op, x, NoiseModel{0.01}, 43u));
}

TEST(Operators, SimulatedNoiseVariance) {
  const double ve = 0.0025;
  const auto op = LinearOperator::identity(100, 100);
  const ImageField x(100, 100, 0.5);
  const Vector e = simulate_measurement(op, x, NoiseModel{ve}, 7u) - op.apply(x);
  const double mean = e.mean();
  const double var = (e.array() - mean).square().sum() / double(e.size() - 1);
  EXPECT_LT(std::abs(var / ve - 1.0), 0.05);
}

TEST(Operators, LogLikelihood) {
  const auto op = LinearOperator::identity(1, 1);
  const ImageField x(1, 1, 0.3);
  const NoiseModel noise{1.0 / (2.0 * std::numbers::pi)};
  EXPECT_NEAR(log_likelihood(op, noise, op.apply(x), x), 0.0, 1e-15);

  // doubling the squared residual adds the quadratic term once more
  const auto op2 = LinearOperator::identity(2, 2);
  const ImageField z(2, 2, 0.0);
  Vector y1(4), y2(4);
  y1 << 1, 0, 0, 0;
  y2 << 1, 1, 0, 0;
  const NoiseModel n2{0.5};
  EXPECT_NEAR(log_likelihood(op2, n2, y1, z) - log_likelihood(op2, n2, y2, z),
              1.0 / (2 * 0.5), 1e-14);
  EXPECT_THROW(log_likelihood(op2, NoiseModel{0.0}, y1, z), ParameterError);
}

TEST(Operators, LogLikelihoodMatchesDenseDensity) {
  Rng rng(6);
  const Kernel psf = {{0.2, 0.5}, {0.1, 0.2}};
  const auto op = LinearOperator::convolution(2, 2, psf);
  const auto x = random_image(2, 2, rng);
  const Vector y = standard_normal(4, rng);
  const double ve = 0.3;
  oracle::DenseGaussian g{oracle::dense_circulant(2, 2, psf) * x.data(),
                          ve * Eigen::MatrixXd::Identity(4, 4)};
  EXPECT_NEAR(log_likelihood(op, NoiseModel{ve}, y, x),
              oracle::log_density(g, y), 1e-12);
}
