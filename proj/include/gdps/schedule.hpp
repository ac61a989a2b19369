#pragma once

#include <cstddef>
#include <vector>

namespace gdps {

/// Variance-preserving diffusion schedule.
///
/// Levels run 0..T. The forward transition into level t (t = 1..T) is
/// x_t = k_t x_{t-1} + sqrt(beta_t) w with k_t^2 + beta_t = 1. The generic
/// backward variance v_back(t), t = 0..T-1, describes the transition from
/// level t+1 down to level t.
class Schedule {
public:
  /// Explicit per-step forward variances beta_1..beta_T, each in (0,1).
  /// An empty vector gives the degenerate T = 0 schedule.
  static Schedule from_betas(std::vector<double> betas);

  /// Linear beta profile from beta_min (t=1) to beta_max (t=T).
  static Schedule linear_vp(int steps, double beta_min, double beta_max);

  int steps() const { return static_cast<int>(beta_.size()) - 1; }

  double beta(int t) const;       // t in 1..T
  double k(int t) const;          // t in 1..T
  double alpha_bar(int t) const;  // t in 0..T, alpha_bar(0) == 1
  double v_back(int t) const;     // t in 0..T-1

  /// Betas as a plain vector beta_1..beta_T.
  std::vector<double> betas() const;

private:
  explicit Schedule(std::vector<double> betas);

  // index 0 holds the identity transition so that index t means level t
  std::vector<double> beta_;
  std::vector<double> k_;
  std::vector<double> alpha_bar_;
  std::vector<double> v_back_;
};

inline constexpr int kDefaultSteps = 50;
inline constexpr double kDefaultBetaMin = 1e-4;
inline constexpr double kDefaultBetaMax = 0.3;

/// Residual signal energy alpha_bar_T at the last level.
double terminal_gap(const Schedule &s);

} // namespace gdps
