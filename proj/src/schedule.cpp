#include "gdps/schedule.hpp"

#include "gdps/errors.hpp"

#include <cmath>
#include <string>

namespace gdps {

namespace {

void check_level(int t, int lo, int hi, const char *what) {
  if (t < lo || t > hi)
    throw ParameterError(std::string(what) + ": level " + std::to_string(t) +
                         " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
}

} // namespace

Schedule::Schedule(std::vector<double> betas) {
  const std::size_t T = betas.size();
  beta_.assign(T + 1, 0.0);
  k_.assign(T + 1, 1.0);
  alpha_bar_.assign(T + 1, 1.0);
  for (std::size_t t = 1; t <= T; ++t) {
    const double b = betas[t - 1];
    if (!(b > 0.0 && b < 1.0))
      throw ParameterError("schedule: beta_" + std::to_string(t) +
                           " must lie in (0,1)");
    beta_[t] = b;
    k_[t] = std::sqrt(1.0 - b);
    alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - b);
  }

  // DDPM posterior variance beta_{t+1} (1 - abar_t) / (1 - abar_{t+1}).
  // At t = 0 that expression vanishes, so the first step uses beta_1, which
  // is the exact conditional variance for a unit-variance signal.
  v_back_.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    v_back_[t] = t == 0 ? beta_[1]
                        : beta_[t + 1] * (1.0 - alpha_bar_[t]) /
                              (1.0 - alpha_bar_[t + 1]);
  }
}

Schedule Schedule::from_betas(std::vector<double> betas) {
  return Schedule(std::move(betas));
}

Schedule Schedule::linear_vp(int steps, double beta_min, double beta_max) {
  if (steps < 1)
    throw ParameterError("linear_vp: T must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw ParameterError("linear_vp: need 0 < beta_min <= beta_max < 1");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const double frac = steps == 1 ? 0.0 : double(t) / double(steps - 1);
    betas[t] = beta_min + frac * (beta_max - beta_min);
  }
  return Schedule(std::move(betas));
}

double Schedule::beta(int t) const {
  check_level(t, 1, steps(), "beta");
  return beta_[t];
}

double Schedule::k(int t) const {
  check_level(t, 1, steps(), "k");
  return k_[t];
}

double Schedule::alpha_bar(int t) const {
  check_level(t, 0, steps(), "alpha_bar");
  return alpha_bar_[t];
}

double Schedule::v_back(int t) const {
  check_level(t, 0, steps() - 1, "v_back");
  return v_back_[t];
}

std::vector<double> Schedule::betas() const {
  return {beta_.begin() + 1, beta_.end()};
}

double terminal_gap(const Schedule &s) { return s.alpha_bar(s.steps()); }

} // namespace gdps
