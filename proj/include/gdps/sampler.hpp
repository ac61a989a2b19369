#pragma once

#include "gdps/denoiser.hpp"
#include "gdps/diagnostics.hpp"
#include "gdps/diffusion.hpp"
#include "gdps/fft.hpp"
#include "gdps/operators.hpp"
#include "gdps/schedule.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace gdps {

/// Largest image the dense x_0 fallback accepts.
inline constexpr Eigen::Index kDenseLimit = 4096;

/// Everything the extended posterior pi(x_{0:T} | y) depends on.
struct GdpsProblem {
  LinearOperator op;
  NoiseModel noise;
  Schedule schedule;
  std::shared_ptr<const Denoiser> denoiser;
  Vector y;

  int height() const { return op.height(); }
  int width() const { return op.width(); }
  void validate() const;
};

enum class SweepOrder { ascending, descending, random_scan };

/// Full conditional of a latent level t in 1..T given its neighbours:
/// N(prev_weight x_{t-1} + next_weight x_{t+1}, 1/precision). For t = T the
/// next neighbour does not exist and next_weight is 0.
struct LatentConditional {
  double precision;
  double prev_weight;
  double next_weight;
};

LatentConditional latent_conditional(const Schedule &s, int t);

/// The same conditional from raw transition parameters: x_t ~ N(k_t x_{t-1},
/// v_t) and x_{t+1} ~ N(k_next x_t, v_next). An infinite v_next drops the
/// second factor.
LatentConditional latent_conditional(double k_t, double v_t, double k_next,
                                     double v_next);

enum class X0Path { automatic, fourier, dense };

/// Exact sampler for the x_0 block
///   N(eps0, Gamma0^{-1}),  Gamma0 = H^T H / v_e + I / v0,
///   eps0 = Gamma0^{-1} (H^T y / v_e + prior_mean / v0).
///
/// The Fourier path diagonalizes Gamma0 with the DFT of a circulant H; the
/// dense path factors Gamma0 once (P <= kDenseLimit). Holds FFT workspace, so
/// each chain needs its own instance.
class X0BlockSampler {
public:
  X0BlockSampler(const GdpsProblem &problem, double prior_variance,
                 X0Path path = X0Path::automatic);

  ImageField draw(const ImageField &prior_mean, Rng &rng);
  ImageField conditional_mean(const ImageField &prior_mean);

  bool uses_fourier() const { return fft_.has_value(); }
  double prior_variance() const { return prior_variance_; }

private:
  Vector draw_fourier(const Vector &prior_mean, const Vector *noise);
  Vector draw_dense(const Vector &prior_mean, const Vector *noise);

  int height_;
  int width_;
  double prior_variance_;
  // Fourier path
  std::optional<Fft2d> fft_;
  Spectrum data_term_;          // conj(H_f) Y_f / v_e
  std::vector<double> precision_; // |H_f|^2 / v_e + 1 / v0
  // dense path
  Vector dense_data_term_;      // H^T y / v_e
  Eigen::LLT<Eigen::MatrixXd> dense_factor_;
};

/// Per-chain Gibbs machinery: owns the x_0 block workspace.
class GibbsKernel {
public:
  explicit GibbsKernel(const GdpsProblem &problem,
                       X0Path path = X0Path::automatic);

  /// Resamples level t from its full conditional.
  void update_level(ChainState &state, int t, Rng &rng);
  /// Visits every level once in the given order. Exactly one denoiser
  /// evaluation per sweep (the x_0 block) when T >= 1.
  void sweep(ChainState &state, SweepOrder order, Rng &rng);

  X0BlockSampler &x0_sampler() { return x0_; }

private:
  const GdpsProblem &problem_;
  X0BlockSampler x0_;
  std::vector<int> order_buffer_;
};

// One-shot conveniences over the classes above.
ImageField sample_x0(const GdpsProblem &problem, const ImageField &x1,
                     Rng &rng);
ImageField sample_xt_interior(const GdpsProblem &problem, int t,
                              const ImageField &x_prev,
                              const ImageField &x_next, Rng &rng);
ImageField sample_xT(const GdpsProblem &problem, const ImageField &x_prev,
                     Rng &rng);
void gibbs_sweep(const GdpsProblem &problem, ChainState &state,
                 SweepOrder order, Rng &rng);

struct RunConfig {
  std::uint64_t seed = 0;
  int chains = 1;
  int max_sweeps = 5000;
  int burn_in = 50;             // sweeps excluded from the accumulators
  double stop_threshold = 1e-2; // on max |running mean change|
  int stop_check_every = 10;
  std::vector<Pixel> trace_pixels;
  int trace_thin = 1;
  SweepOrder sweep_order = SweepOrder::ascending;

  void validate() const;
};

/// Initial state: x_0 = y (H^T y for masks), x_{1:T} by forward noising.
ChainState initial_state(const GdpsProblem &problem, Rng &rng);

/// Runs config.chains independent chains (concurrently, disjoint seeds
/// derived from config.seed) and merges their x_0 moments.
///
/// Each chain stops when, at a check every stop_check_every post-burn-in
/// sweeps, the running mean has moved by less than stop_threshold (max
/// absolute pixel change) since the previous check, or at max_sweeps.
RunReport run(const GdpsProblem &problem, const RunConfig &config);

/// Seed of chain `index` derived from the run seed.
std::uint64_t chain_seed(std::uint64_t seed, int index);

} // namespace gdps
