#pragma once

#include "gdps/denoiser.hpp"
#include "gdps/image.hpp"
#include "gdps/schedule.hpp"

#include <vector>

namespace gdps {

/// Trajectory x_0..x_T; every level has the same shape.
struct ChainState {
  std::vector<ImageField> levels;

  int steps() const { return int(levels.size()) - 1; }
  ImageField &operator[](int t) { return levels[std::size_t(t)]; }
  const ImageField &operator[](int t) const { return levels[std::size_t(t)]; }
  bool all_finite() const;
};

/// Variance of the backward step t+1 -> t: the denoiser's exact value when
/// it has one, the schedule's generic value otherwise.
double backward_variance(const Schedule &s, const Denoiser &d, int t);

/// x_t = k_t x_{t-1} + sqrt(beta_t) w.
ImageField forward_step(const Schedule &s, int t, const ImageField &x_prev,
                        Rng &rng);

/// Runs forward_step for t = 1..T starting from x0.
ChainState forward_trajectory(const Schedule &s, const ImageField &x0,
                              Rng &rng);

/// x_T ~ N(0, I), then x_t ~ N(mu_t(x_{t+1}), v_back_t I) for t = T-1..0.
ChainState ancestral_sample(const Schedule &s, const Denoiser &d, int height,
                            int width, Rng &rng);

} // namespace gdps
