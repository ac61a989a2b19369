#include "gdps/sampler.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

namespace gdps {

void GdpsProblem::validate() const {
  noise.validate();
  if (!denoiser)
    throw ParameterError("problem: no denoiser");
  if (y.size() != op.range_size())
    throw DimensionError("problem: measurement length " +
                         std::to_string(y.size()) + " != operator range " +
                         std::to_string(op.range_size()));
  if (!y.allFinite())
    throw ParameterError("problem: non-finite measurement");
}

LatentConditional latent_conditional(const Schedule &s, int t) {
  const int T = s.steps();
  if (t < 1 || t > T)
    throw ParameterError("latent_conditional: level " + std::to_string(t) +
                         " outside [1, " + std::to_string(T) + "]");
  const double vt = s.beta(t);
  if (t == T)
    return {1.0 / vt, s.k(t), 0.0};
  return latent_conditional(s.k(t), vt, s.k(t + 1), s.beta(t + 1));
}

LatentConditional latent_conditional(double k_t, double v_t, double k_next,
                                     double v_next) {
  if (!(v_t > 0.0) || !(v_next > 0.0))
    throw ParameterError("latent_conditional: variances must be positive");
  const double next_precision = std::isinf(v_next) ? 0.0 : 1.0 / v_next;
  const double precision = 1.0 / v_t + k_next * k_next * next_precision;
  return {precision, k_t / v_t / precision,
          k_next * next_precision / precision};
}

// ---------------------------------------------------------------- x_0 block

X0BlockSampler::X0BlockSampler(const GdpsProblem &problem,
                               double prior_variance, X0Path path)
    : height_(problem.height()), width_(problem.width()),
      prior_variance_(prior_variance) {
  problem.validate();
  if (!(prior_variance > 0.0) || !std::isfinite(prior_variance))
    throw ParameterError("x0 block: backward variance v0 must be positive");
  const double ve = problem.noise.variance;
  const Eigen::Index npix = problem.op.domain_size();

  const bool fourier =
      path == X0Path::fourier ||
      (path == X0Path::automatic && problem.op.has_transfer());
  if (fourier) {
    if (!problem.op.has_transfer())
      throw UnsupportedOperatorError(
          "x0 block: Fourier path needs a circulant operator");
    fft_.emplace(height_, width_);
    const Spectrum &transfer = problem.op.transfer();
    data_term_ = fft_->forward(problem.y);
    precision_.resize(transfer.size());
    for (std::size_t f = 0; f < transfer.size(); ++f) {
      data_term_[f] *= std::conj(transfer[f]) / ve;
      precision_[f] = std::norm(transfer[f]) / ve + 1.0 / prior_variance;
    }
    return;
  }

  if (npix > kDenseLimit)
    throw UnsupportedOperatorError(
        "x0 block: operator has no transfer function and P = " +
        std::to_string(npix) + " exceeds the dense limit " +
        std::to_string(kDenseLimit));
  // Gamma0 column by column from H^T H e_i.
  Eigen::MatrixXd gram(npix, npix);
  ImageField unit(height_, width_);
  for (Eigen::Index i = 0; i < npix; ++i) {
    unit.data().setZero();
    unit.data()[i] = 1.0;
    gram.col(i) = problem.op.adjoint(problem.op.apply(unit)).data();
  }
  gram /= ve;
  gram.diagonal().array() += 1.0 / prior_variance;
  dense_factor_.compute(gram);
  if (dense_factor_.info() != Eigen::Success)
    throw NumericalError("x0 block: Cholesky factorization failed");
  dense_data_term_ = problem.op.adjoint(problem.y).data() / ve;
}

Vector X0BlockSampler::draw_fourier(const Vector &prior_mean,
                                    const Vector *noise) {
  Spectrum spectrum = fft_->forward(prior_mean);
  Spectrum fluct;
  if (noise)
    fluct = fft_->forward(*noise);
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    const double lambda = precision_[f];
    spectrum[f] = (data_term_[f] + spectrum[f] / prior_variance_) / lambda;
    // lambda is real and even in f, so the scaled white noise stays real
    if (noise)
      spectrum[f] += fluct[f] / std::sqrt(lambda);
  }
  return fft_->inverse_real(spectrum);
}

Vector X0BlockSampler::draw_dense(const Vector &prior_mean,
                                  const Vector *noise) {
  Vector x = dense_factor_.solve(dense_data_term_ + prior_mean / prior_variance_);
  if (noise)
    x += dense_factor_.matrixU().solve(*noise);
  return x;
}

ImageField X0BlockSampler::draw(const ImageField &prior_mean, Rng &rng) {
  if (prior_mean.height() != height_ || prior_mean.width() != width_)
    throw DimensionError("x0 block: prior mean has the wrong shape");
  const Vector noise = standard_normal(prior_mean.size(), rng);
  Vector x = fft_ ? draw_fourier(prior_mean.data(), &noise)
                  : draw_dense(prior_mean.data(), &noise);
  return ImageField(height_, width_, std::move(x));
}

ImageField X0BlockSampler::conditional_mean(const ImageField &prior_mean) {
  if (prior_mean.height() != height_ || prior_mean.width() != width_)
    throw DimensionError("x0 block: prior mean has the wrong shape");
  Vector x = fft_ ? draw_fourier(prior_mean.data(), nullptr)
                  : draw_dense(prior_mean.data(), nullptr);
  return ImageField(height_, width_, std::move(x));
}

// ------------------------------------------------------------ latent blocks

namespace {

double x0_prior_variance(const GdpsProblem &problem) {
  // With no latent levels the x_0 prior is the terminal noise law N(0, I).
  if (problem.schedule.steps() == 0)
    return 1.0;
  return backward_variance(problem.schedule, *problem.denoiser, 0);
}

ImageField draw_latent(const Schedule &s, int t, const ImageField &x_prev,
                       const ImageField *x_next, Rng &rng) {
  const LatentConditional c = latent_conditional(s, t);
  Vector x = c.prev_weight * x_prev.data();
  if (x_next)
    x += c.next_weight * x_next->data();
  x += standard_normal(x.size(), rng) / std::sqrt(c.precision);
  return ImageField(x_prev.height(), x_prev.width(), std::move(x));
}

} // namespace

ImageField sample_x0(const GdpsProblem &problem, const ImageField &x1,
                     Rng &rng) {
  X0BlockSampler sampler(problem, x0_prior_variance(problem));
  return sampler.draw(problem.denoiser->mean(0, x1), rng);
}

ImageField sample_xt_interior(const GdpsProblem &problem, int t,
                              const ImageField &x_prev,
                              const ImageField &x_next, Rng &rng) {
  if (t < 1 || t >= problem.schedule.steps())
    throw ParameterError("sample_xt_interior: level " + std::to_string(t) +
                         " is not interior");
  require_same_shape(x_prev, x_next, "sample_xt_interior");
  return draw_latent(problem.schedule, t, x_prev, &x_next, rng);
}

ImageField sample_xT(const GdpsProblem &problem, const ImageField &x_prev,
                     Rng &rng) {
  return draw_latent(problem.schedule, problem.schedule.steps(), x_prev,
                     nullptr, rng);
}

// ------------------------------------------------------------------- sweeps

GibbsKernel::GibbsKernel(const GdpsProblem &problem, X0Path path)
    : problem_(problem), x0_(problem, x0_prior_variance(problem), path) {}

void GibbsKernel::update_level(ChainState &state, int t, Rng &rng) {
  const int T = problem_.schedule.steps();
  if (t == 0) {
    if (T == 0) {
      state[0] = x0_.draw(
          ImageField(problem_.height(), problem_.width(), 0.0), rng);
    } else {
      state[0] = x0_.draw(problem_.denoiser->mean(0, state[1]), rng);
    }
    return;
  }
  state[t] = draw_latent(problem_.schedule, t, state[t - 1],
                         t < T ? &state[t + 1] : nullptr, rng);
}

void GibbsKernel::sweep(ChainState &state, SweepOrder order, Rng &rng) {
  const int T = problem_.schedule.steps();
  if (state.steps() != T)
    throw DimensionError("sweep: state has " + std::to_string(state.steps()) +
                         " latent levels, schedule has " + std::to_string(T));
  order_buffer_.resize(std::size_t(T) + 1);
  std::iota(order_buffer_.begin(), order_buffer_.end(), 0);
  if (order == SweepOrder::descending)
    std::reverse(order_buffer_.begin(), order_buffer_.end());
  else if (order == SweepOrder::random_scan)
    std::shuffle(order_buffer_.begin(), order_buffer_.end(), rng);
  for (int t : order_buffer_)
    update_level(state, t, rng);
}

void gibbs_sweep(const GdpsProblem &problem, ChainState &state,
                 SweepOrder order, Rng &rng) {
  GibbsKernel kernel(problem);
  kernel.sweep(state, order, rng);
}

// ---------------------------------------------------------------------- run

void RunConfig::validate() const {
  if (chains < 1)
    throw ParameterError("run: chains must be >= 1");
  if (max_sweeps < 1)
    throw ParameterError("run: max_sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= max_sweeps)
    throw ParameterError("run: need 0 <= burn_in < max_sweeps");
  if (!(stop_threshold >= 0.0))
    throw ParameterError("run: stop_threshold must be >= 0");
  if (stop_check_every < 1)
    throw ParameterError("run: stop_check_every must be >= 1");
  if (trace_thin < 1)
    throw ParameterError("run: trace_thin must be >= 1");
}

std::uint64_t chain_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                    std::uint32_t(index), 0x67647073u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[1]) << 32) | words[0];
}

ChainState initial_state(const GdpsProblem &problem, Rng &rng) {
  ImageField x0 = problem.op.kind() == OperatorKind::mask
                      ? problem.op.adjoint(problem.y)
                      : ImageField(problem.height(), problem.width(),
                                   problem.y);
  return forward_trajectory(problem.schedule, x0, rng);
}

namespace {

struct ChainResult {
  Vector mean;
  Vector m2; // sum of squared deviations
  std::size_t count = 0;
  int sweeps = 0;
  bool converged = false;
  std::vector<PixelTrace> traces;
};

ChainResult run_chain(const GdpsProblem &problem, const RunConfig &config,
                      int index) {
  Rng rng(chain_seed(config.seed, index));
  GibbsKernel kernel(problem);
  ChainState state = initial_state(problem, rng);

  const Eigen::Index npix = problem.op.domain_size();
  ChainResult out;
  out.mean = Vector::Zero(npix);
  out.m2 = Vector::Zero(npix);
  for (const auto &p : config.trace_pixels)
    out.traces.push_back(PixelTrace{p, index, {}, {}});

  std::optional<Vector> last_check;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    kernel.sweep(state, config.sweep_order, rng);
    out.sweeps = sweep;
    const ImageField &x0 = state[0];
    if (!x0.all_finite())
      throw NumericalError("run: non-finite x0 at sweep " +
                           std::to_string(sweep));

    if ((sweep - 1) % config.trace_thin == 0)
      for (auto &trace : out.traces) {
        trace.sweeps.push_back(sweep);
        trace.values.push_back(x0(trace.pixel.row, trace.pixel.col));
      }

    if (sweep <= config.burn_in)
      continue;
    // Welford update
    ++out.count;
    const Vector delta = x0.data() - out.mean;
    out.mean += delta / double(out.count);
    out.m2 += delta.cwiseProduct(x0.data() - out.mean);

    if ((sweep - config.burn_in) % config.stop_check_every == 0) {
      if (last_check &&
          (out.mean - *last_check).cwiseAbs().maxCoeff() <
              config.stop_threshold) {
        out.converged = true;
        break;
      }
      last_check = out.mean;
    }
  }
  return out;
}

} // namespace

RunReport run(const GdpsProblem &problem, const RunConfig &config) {
  problem.validate();
  config.validate();
  for (const auto &p : config.trace_pixels)
    if (p.row < 0 || p.row >= problem.height() || p.col < 0 ||
        p.col >= problem.width())
      throw DimensionError("run: trace pixel out of range");

  const auto start = std::chrono::steady_clock::now();
  std::vector<ChainResult> results(std::size_t(config.chains));
  if (config.chains == 1) {
    results[0] = run_chain(problem, config, 0);
  } else {
    std::vector<std::exception_ptr> errors(results.size());
    std::vector<std::thread> workers;
    for (int c = 0; c < config.chains; ++c)
      workers.emplace_back([&, c] {
        try {
          results[std::size_t(c)] = run_chain(problem, config, c);
        } catch (...) {
          errors[std::size_t(c)] = std::current_exception();
        }
      });
    for (auto &w : workers)
      w.join();
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
  }

  // Merge the per-chain moments in chain order (Chan et al. pairwise update).
  const Eigen::Index npix = problem.op.domain_size();
  Vector mean = Vector::Zero(npix);
  Vector m2 = Vector::Zero(npix);
  std::size_t count = 0;
  RunReport report;
  report.converged = true;
  for (auto &r : results) {
    if (r.count > 0) {
      const double na = double(count), nb = double(r.count);
      const Vector delta = r.mean - mean;
      mean += delta * (nb / (na + nb));
      m2 += r.m2 + delta.cwiseAbs2() * (na * nb / (na + nb));
      count += r.count;
    }
    report.sweeps_run += r.sweeps;
    report.chain_sweeps.push_back(r.sweeps);
    report.converged = report.converged && r.converged;
    for (auto &t : r.traces)
      report.traces.push_back(std::move(t));
  }
  const Vector var =
      count > 1 ? Vector(m2 / double(count - 1)) : Vector(Vector::Zero(npix));
  report.posterior_mean = ImageField(problem.height(), problem.width(), mean);
  report.psd =
      ImageField(problem.height(), problem.width(), var.cwiseSqrt());
  report.samples_used = count;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

} // namespace gdps
