#pragma once

#include "gdps/image.hpp"
#include "gdps/schedule.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <vector>

namespace gdps {

/// Backward mean mu_t(x_{t+1}) of the generative chain.
///
/// Implementations must be deterministic in (t, x_next) and reentrant: one
/// instance is shared read-only by every chain of a run. A learned network
/// plugs in by implementing this interface; the level t is the only noise
/// information it receives.
class Denoiser {
public:
  virtual ~Denoiser() = default;

  /// t in 0..T-1; returns an image with the shape of x_next.
  virtual ImageField mean(int t, const ImageField &x_next) const = 0;

  /// The true conditional variance of x_t given x_{t+1}, when known.
  virtual std::optional<double> exact_v_back(int /*t*/) const {
    return std::nullopt;
  }
};

/// pi_0 = N(mean, variance I).
struct GaussianPrior {
  ImageField mean;
  double variance = 1.0;
};

struct GmmComponent {
  double weight = 1.0;
  ImageField mean;
  double variance = 1.0;
};

/// pi_0 = sum_j w_j N(m_j, s_j^2 I).
struct GmmPrior {
  std::vector<GmmComponent> components;
};

void validate(const GaussianPrior &prior);
void validate(const GmmPrior &prior);

/// Exact draws from the priors (used for synthetic ground truths).
ImageField draw_prior(const GaussianPrior &prior, Rng &rng);
ImageField draw_prior(const GmmPrior &prior, Rng &rng);

/// Exact MMSE denoiser E[x_t | x_{t+1}] when x_0 ~ N(m0, s0^2 I).
///
/// Under the forward chain x_t ~ N(m_t, sigma_t^2 I) with m_t = sqrt(abar_t)
/// m0 and sigma_t^2 = abar_t s0^2 + 1 - abar_t. Conditioning on
/// x_{t+1} = k x_t + sqrt(beta) w gives
///   mean = m_t + g_t (x_{t+1} - k m_t),  g_t = k sigma_t^2 / c_t,
///   var  = sigma_t^2 beta / c_t,         c_t = k^2 sigma_t^2 + beta,
/// where k and beta belong to step t+1.
class GaussianPriorDenoiser final : public Denoiser {
public:
  GaussianPriorDenoiser(GaussianPrior prior, Schedule schedule);

  ImageField mean(int t, const ImageField &x_next) const override;
  std::optional<double> exact_v_back(int t) const override;

  const GaussianPrior &prior() const { return prior_; }

private:
  GaussianPrior prior_;
  Schedule schedule_;
};

/// Exact MMSE denoiser for an isotropic Gaussian-mixture prior.
///
/// Each component propagates through the forward chain as in the Gaussian
/// case; the result is the responsibility-weighted average of per-component
/// conditional means, with responsibilities taken from the component
/// marginals of x_{t+1} (over the whole image) via log-sum-exp.
class GmmPriorDenoiser final : public Denoiser {
public:
  GmmPriorDenoiser(GmmPrior prior, Schedule schedule);

  ImageField mean(int t, const ImageField &x_next) const override;

  /// Posterior component probabilities given x_{t+1}.
  std::vector<double> responsibilities(int t, const ImageField &x_next) const;

  const GmmPrior &prior() const { return prior_; }

private:
  GmmPrior prior_;
  Schedule schedule_;
};

/// Forwards to another denoiser and counts mean() evaluations.
class CountingDenoiser final : public Denoiser {
public:
  explicit CountingDenoiser(std::shared_ptr<const Denoiser> inner);

  ImageField mean(int t, const ImageField &x_next) const override;
  std::optional<double> exact_v_back(int t) const override;

  std::size_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

private:
  std::shared_ptr<const Denoiser> inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

} // namespace gdps
