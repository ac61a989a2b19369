#include "gdps/diffusion.hpp"

#include "gdps/errors.hpp"

#include <cmath>
#include <string>

namespace gdps {

bool ChainState::all_finite() const {
  for (const auto &level : levels)
    if (!level.all_finite() || !level.same_shape(levels.front()))
      return false;
  return true;
}

double backward_variance(const Schedule &s, const Denoiser &d, int t) {
  if (auto exact = d.exact_v_back(t))
    return *exact;
  return s.v_back(t);
}

ImageField forward_step(const Schedule &s, int t, const ImageField &x_prev,
                        Rng &rng) {
  const double k = s.k(t);
  const double sd = std::sqrt(s.beta(t));
  Vector next = k * x_prev.data() + sd * standard_normal(x_prev.size(), rng);
  return ImageField(x_prev.height(), x_prev.width(), std::move(next));
}

ChainState forward_trajectory(const Schedule &s, const ImageField &x0,
                              Rng &rng) {
  ChainState chain;
  chain.levels.reserve(std::size_t(s.steps()) + 1);
  chain.levels.push_back(x0);
  for (int t = 1; t <= s.steps(); ++t)
    chain.levels.push_back(forward_step(s, t, chain.levels.back(), rng));
  return chain;
}

ChainState ancestral_sample(const Schedule &s, const Denoiser &d, int height,
                            int width, Rng &rng) {
  const int T = s.steps();
  ChainState chain;
  chain.levels.resize(std::size_t(T) + 1);
  chain[T] = ImageField(height, width,
                        standard_normal(Eigen::Index(height) * width, rng));
  for (int t = T - 1; t >= 0; --t) {
    ImageField mean = d.mean(t, chain[t + 1]);
    if (!mean.same_shape(chain[t + 1]))
      throw DimensionError("ancestral_sample: denoiser changed the shape");
    const double sd = std::sqrt(backward_variance(s, d, t));
    mean.data() += sd * standard_normal(mean.size(), rng);
    chain[t] = std::move(mean);
  }
  return chain;
}

} // namespace gdps
