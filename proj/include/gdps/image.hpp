#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <random>

namespace gdps {

using Rng = std::mt19937_64;
using Vector = Eigen::VectorXd;

/// Row-major real image; pixel (r, c) lives at index r * width + c.
class ImageField {
public:
  ImageField() = default;
  ImageField(int height, int width);
  ImageField(int height, int width, double fill);
  ImageField(int height, int width, Vector data);

  int height() const { return height_; }
  int width() const { return width_; }
  Eigen::Index size() const { return data_.size(); }

  const Vector &data() const { return data_; }
  Vector &data() { return data_; }

  double &operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }
  Eigen::Index index(int r, int c) const {
    return Eigen::Index(r) * width_ + c;
  }

  bool same_shape(const ImageField &other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const { return data_.allFinite(); }

private:
  int height_ = 0;
  int width_ = 0;
  Vector data_;
};

/// Fills `out` with i.i.d. N(0, 1) draws.
void fill_standard_normal(Vector &out, Rng &rng);
Vector standard_normal(Eigen::Index n, Rng &rng);

void require_same_shape(const ImageField &a, const ImageField &b,
                        const char *where);

} // namespace gdps
