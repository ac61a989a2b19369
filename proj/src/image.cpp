#include "gdps/image.hpp"

#include "gdps/errors.hpp"

#include <string>

namespace gdps {

ImageField::ImageField(int height, int width)
    : ImageField(height, width, 0.0) {}

ImageField::ImageField(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0)
    throw DimensionError("image: height and width must be positive");
  data_ = Vector::Constant(Eigen::Index(height) * width, fill);
}

ImageField::ImageField(int height, int width, Vector data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0)
    throw DimensionError("image: height and width must be positive");
  if (data_.size() != Eigen::Index(height) * width)
    throw DimensionError("image: data length " + std::to_string(data_.size()) +
                         " != " + std::to_string(height) + "x" +
                         std::to_string(width));
}

void fill_standard_normal(Vector &out, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = normal(rng);
}

Vector standard_normal(Eigen::Index n, Rng &rng) {
  Vector out(n);
  fill_standard_normal(out, rng);
  return out;
}

void require_same_shape(const ImageField &a, const ImageField &b,
                        const char *where) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(where) + ": shape " +
                         std::to_string(a.height()) + "x" +
                         std::to_string(a.width()) + " vs " +
                         std::to_string(b.height()) + "x" +
                         std::to_string(b.width()));
}

} // namespace gdps
