#include "gdps/operators.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gdps {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

void check_domain(const LinearOperator &op, const ImageField &x,
                  const char *where) {
  if (x.height() != op.height() || x.width() != op.width())
    throw DimensionError(std::string(where) + ": image is " +
                         std::to_string(x.height()) + "x" +
                         std::to_string(x.width()) + ", operator expects " +
                         std::to_string(op.height()) + "x" +
                         std::to_string(op.width()));
}

} // namespace

Kernel uniform_psf(int n) {
  if (n <= 0)
    throw ParameterError("uniform_psf: size must be positive");
  const double w = 1.0 / double(n * n);
  return Kernel(std::size_t(n), std::vector<double>(std::size_t(n), w));
}

LinearOperator::LinearOperator(OperatorKind kind, int height, int width)
    : kind_(kind), height_(height), width_(width) {
  if (height <= 0 || width <= 0)
    throw DimensionError("operator: grid must be non-empty");
}

LinearOperator LinearOperator::identity(int height, int width) {
  LinearOperator op(OperatorKind::identity, height, width);
  op.transfer_.assign(std::size_t(op.domain_size()), {1.0, 0.0});
  return op;
}

LinearOperator LinearOperator::convolution(int height, int width, Kernel psf) {
  LinearOperator op(OperatorKind::convolution, height, width);
  if (psf.empty() || psf.front().empty())
    throw ParameterError("convolution: empty PSF");
  const std::size_t cols = psf.front().size();
  for (const auto &row : psf) {
    if (row.size() != cols)
      throw ParameterError("convolution: ragged PSF rows");
    for (double v : row)
      if (!std::isfinite(v))
        throw ParameterError("convolution: non-finite PSF weight");
  }
  if (psf.size() > std::size_t(height) || cols > std::size_t(width))
    throw DimensionError("convolution: PSF larger than the image");
  op.psf_ = std::move(psf);

  // Embed the kernel with its centre at the origin and take the DFT.
  const int kh = int(op.psf_.size());
  const int kw = int(cols);
  Vector embedded = Vector::Zero(op.domain_size());
  for (int i = 0; i < kh; ++i)
    for (int j = 0; j < kw; ++j) {
      const int r = wrap(i - kh / 2, height);
      const int c = wrap(j - kw / 2, width);
      embedded[Eigen::Index(r) * width + c] += op.psf_[i][j];
    }
  Fft2d fft(height, width);
  op.transfer_ = fft.forward(embedded);
  return op;
}

LinearOperator LinearOperator::mask(int height, int width,
                                    std::vector<Eigen::Index> kept) {
  LinearOperator op(OperatorKind::mask, height, width);
  std::vector<Eigen::Index> sorted = kept;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("mask: duplicate kept index");
  for (auto idx : kept)
    if (idx < 0 || idx >= op.domain_size())
      throw DimensionError("mask: kept index " + std::to_string(idx) +
                           " out of range");
  op.kept_ = std::move(kept);
  return op;
}

Eigen::Index LinearOperator::range_size() const {
  return kind_ == OperatorKind::mask ? Eigen::Index(kept_.size())
                                     : domain_size();
}

Vector LinearOperator::apply(const ImageField &x) const {
  check_domain(*this, x, "apply");
  switch (kind_) {
  case OperatorKind::identity:
    return x.data();
  case OperatorKind::mask: {
    Vector y(range_size());
    for (std::size_t m = 0; m < kept_.size(); ++m)
      y[Eigen::Index(m)] = x.data()[kept_[m]];
    return y;
  }
  case OperatorKind::convolution: {
    const int kh = int(psf_.size());
    const int kw = int(psf_.front().size());
    Vector y = Vector::Zero(domain_size());
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kh; ++i)
          for (int j = 0; j < kw; ++j)
            acc += psf_[i][j] *
                   x(wrap(r - (i - kh / 2), height_),
                     wrap(c - (j - kw / 2), width_));
        y[Eigen::Index(r) * width_ + c] = acc;
      }
    return y;
  }
  }
  return {};
}

ImageField LinearOperator::adjoint(const Vector &y) const {
  if (y.size() != range_size())
    throw DimensionError("adjoint: measurement length " +
                         std::to_string(y.size()) + " != " +
                         std::to_string(range_size()));
  switch (kind_) {
  case OperatorKind::identity:
    return ImageField(height_, width_, y);
  case OperatorKind::mask: {
    ImageField x(height_, width_);
    for (std::size_t m = 0; m < kept_.size(); ++m)
      x.data()[kept_[m]] = y[Eigen::Index(m)];
    return x;
  }
  case OperatorKind::convolution: {
    // correlation with the PSF
    const int kh = int(psf_.size());
    const int kw = int(psf_.front().size());
    ImageField x(height_, width_);
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kh; ++i)
          for (int j = 0; j < kw; ++j)
            acc += psf_[i][j] *
                   y[Eigen::Index(wrap(r + (i - kh / 2), height_)) * width_ +
                     wrap(c + (j - kw / 2), width_)];
        x(r, c) = acc;
      }
    return x;
  }
  }
  return {};
}

Vector apply_via_transfer(const LinearOperator &op, const ImageField &x,
                          Fft2d &fft) {
  check_domain(op, x, "apply_via_transfer");
  if (!op.has_transfer())
    throw UnsupportedOperatorError("apply_via_transfer: no transfer function");
  Spectrum spectrum = fft.forward(x.data());
  for (std::size_t f = 0; f < spectrum.size(); ++f)
    spectrum[f] *= op.transfer()[f];
  return fft.inverse_real(spectrum);
}

void NoiseModel::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw ParameterError("noise: variance must be positive and finite");
}

Vector simulate_measurement(const LinearOperator &op, const ImageField &x0,
                            const NoiseModel &noise, Rng &rng) {
  if (!(noise.variance >= 0.0))
    throw ParameterError("simulate_measurement: negative noise variance");
  Vector y = op.apply(x0);
  if (noise.variance > 0.0)
    y += std::sqrt(noise.variance) * standard_normal(y.size(), rng);
  return y;
}

Vector simulate_measurement(const LinearOperator &op, const ImageField &x0,
                            const NoiseModel &noise, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_measurement(op, x0, noise, rng);
}

double log_likelihood(const LinearOperator &op, const NoiseModel &noise,
                      const Vector &y, const ImageField &x0) {
  noise.validate();
  if (y.size() != op.range_size())
    throw DimensionError("log_likelihood: measurement length mismatch");
  const Vector residual = y - op.apply(x0);
  const double m = double(y.size());
  return -residual.squaredNorm() / (2.0 * noise.variance) -
         0.5 * m * std::log(2.0 * std::numbers::pi * noise.variance);
}

} // namespace gdps
