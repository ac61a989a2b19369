#include "gdps/fft.hpp"

#include "gdps/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <utility>

namespace gdps {

namespace {

// The FFTW planner is not reentrant; execution with fftw_execute is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

Fft2d::Fft2d(int height, int width)
    : height_(height), width_(width),
      size_(std::size_t(height) * std::size_t(width)) {
  if (height <= 0 || width <= 0)
    throw DimensionError("fft: grid must be non-empty");
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto *in = fftw_alloc_complex(size_);
  auto *out = fftw_alloc_complex(size_);
  in_ = in;
  out_ = out;
  plan_forward_ =
      fftw_plan_dft_2d(height, width, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_backward_ =
      fftw_plan_dft_2d(height, width, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_forward_ || !plan_backward_) {
    release();
    throw NumericalError("fft: FFTW planning failed");
  }
}

Fft2d::~Fft2d() { release(); }

Fft2d::Fft2d(Fft2d &&other) noexcept { *this = std::move(other); }

Fft2d &Fft2d::operator=(Fft2d &&other) noexcept {
  if (this != &other) {
    release();
    height_ = std::exchange(other.height_, 0);
    width_ = std::exchange(other.width_, 0);
    size_ = std::exchange(other.size_, 0);
    in_ = std::exchange(other.in_, nullptr);
    out_ = std::exchange(other.out_, nullptr);
    plan_forward_ = std::exchange(other.plan_forward_, nullptr);
    plan_backward_ = std::exchange(other.plan_backward_, nullptr);
  }
  return *this;
}

void Fft2d::release() {
  if (!in_ && !plan_forward_)
    return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_forward_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(in_);
  fftw_free(out_);
  in_ = out_ = plan_forward_ = plan_backward_ = nullptr;
}

Spectrum Fft2d::forward(const Vector &real) {
  if (std::size_t(real.size()) != size_)
    throw DimensionError("fft: input length does not match grid");
  auto *in = static_cast<fftw_complex *>(in_);
  for (std::size_t i = 0; i < size_; ++i) {
    in[i][0] = real[Eigen::Index(i)];
    in[i][1] = 0.0;
  }
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  Spectrum result(size_);
  std::memcpy(result.data(), out_, size_ * sizeof(fftw_complex));
  return result;
}

Spectrum Fft2d::forward(const Spectrum &in) {
  if (in.size() != size_)
    throw DimensionError("fft: input length does not match grid");
  std::memcpy(in_, in.data(), size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  Spectrum result(size_);
  std::memcpy(result.data(), out_, size_ * sizeof(fftw_complex));
  return result;
}

Spectrum Fft2d::inverse(const Spectrum &in) {
  if (in.size() != size_)
    throw DimensionError("fft: input length does not match grid");
  std::memcpy(in_, in.data(), size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  Spectrum result(size_);
  std::memcpy(result.data(), out_, size_ * sizeof(fftw_complex));
  const double scale = 1.0 / double(size_);
  for (auto &z : result)
    z *= scale;
  return result;
}

Vector Fft2d::inverse_real(const Spectrum &in) {
  if (in.size() != size_)
    throw DimensionError("fft: input length does not match grid");
  std::memcpy(in_, in.data(), size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  const auto *out = static_cast<const fftw_complex *>(out_);
  Vector result(static_cast<Eigen::Index>(size_));
  const double scale = 1.0 / double(size_);
  for (std::size_t i = 0; i < size_; ++i)
    result[Eigen::Index(i)] = out[i][0] * scale;
  return result;
}

} // namespace gdps
