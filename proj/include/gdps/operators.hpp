#pragma once

#include "gdps/fft.hpp"
#include "gdps/image.hpp"

#include <cstdint>
#include <vector>

namespace gdps {

enum class OperatorKind { identity, convolution, mask };

/// Point-spread function, row-major rows of equal length. The element at
/// (rows/2, cols/2) sits on the output pixel.
using Kernel = std::vector<std::vector<double>>;

/// Uniform n x n kernel with weights 1/n^2.
Kernel uniform_psf(int n);

/// Linear observation model H: R^P -> R^M.
///
/// Convolutions use periodic boundaries, so they are circulant and carry a
/// Fourier transfer function (as does the identity). Masks restrict to a
/// subset of pixel indices and have no transfer function.
class LinearOperator {
public:
  static LinearOperator identity(int height, int width);
  static LinearOperator convolution(int height, int width, Kernel psf);
  static LinearOperator mask(int height, int width,
                             std::vector<Eigen::Index> kept);

  OperatorKind kind() const { return kind_; }
  int height() const { return height_; }
  int width() const { return width_; }
  Eigen::Index domain_size() const { return Eigen::Index(height_) * width_; }
  Eigen::Index range_size() const;

  bool has_transfer() const { return !transfer_.empty(); }
  /// Eigenvalues of the circulant H in unnormalized-DFT ordering.
  const Spectrum &transfer() const { return transfer_; }
  const Kernel &psf() const { return psf_; }
  const std::vector<Eigen::Index> &kept() const { return kept_; }

  /// H x (spatial evaluation).
  Vector apply(const ImageField &x) const;
  /// H^T y.
  ImageField adjoint(const Vector &y) const;

private:
  LinearOperator(OperatorKind kind, int height, int width);

  OperatorKind kind_;
  int height_;
  int width_;
  Kernel psf_;
  std::vector<Eigen::Index> kept_;
  Spectrum transfer_;
};

/// H x evaluated as inverse-FFT(transfer . FFT(x)); requires a transfer.
Vector apply_via_transfer(const LinearOperator &op, const ImageField &x,
                          Fft2d &fft);

/// White Gaussian error with variance v_e = sigma_e^2.
struct NoiseModel {
  double variance = 1.0;

  static NoiseModel from_sigma(double sigma) { return {sigma * sigma}; }
  /// Throws ParameterError unless variance > 0.
  void validate() const;
};

/// y = H x0 + e with e ~ N(0, v_e I). A zero variance is accepted here and
/// returns H x0 exactly.
Vector simulate_measurement(const LinearOperator &op, const ImageField &x0,
                            const NoiseModel &noise, std::uint64_t seed);
Vector simulate_measurement(const LinearOperator &op, const ImageField &x0,
                            const NoiseModel &noise, Rng &rng);

/// log N(y; H x0, v_e I).
double log_likelihood(const LinearOperator &op, const NoiseModel &noise,
                      const Vector &y, const ImageField &x0);

} // namespace gdps
