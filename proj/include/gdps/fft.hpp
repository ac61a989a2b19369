#pragma once

#include "gdps/image.hpp"

#include <complex>
#include <vector>

namespace gdps {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized 2-D DFT over a height x width grid (FFTW backed).
///
/// forward() computes X[f] = sum_n x[n] exp(-2 pi i f.n / N); inverse()
/// divides by P so that inverse(forward(x)) == x. One instance owns its
/// plans and buffers and must not be used from two threads at once; give
/// each worker its own.
class Fft2d {
public:
  Fft2d(int height, int width);
  ~Fft2d();
  Fft2d(const Fft2d &) = delete;
  Fft2d &operator=(const Fft2d &) = delete;
  Fft2d(Fft2d &&other) noexcept;
  Fft2d &operator=(Fft2d &&other) noexcept;

  int height() const { return height_; }
  int width() const { return width_; }

  Spectrum forward(const Vector &real);
  Spectrum forward(const Spectrum &in);
  Spectrum inverse(const Spectrum &in);
  /// Inverse transform keeping only the real part.
  Vector inverse_real(const Spectrum &in);

private:
  void release();

  int height_ = 0;
  int width_ = 0;
  std::size_t size_ = 0;
  void *in_ = nullptr;
  void *out_ = nullptr;
  void *plan_forward_ = nullptr;
  void *plan_backward_ = nullptr;
};

} // namespace gdps
