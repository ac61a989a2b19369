#include "gdps/denoiser.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace gdps {

namespace {

void check_t(int t, const Schedule &s) {
  if (t < 0 || t >= s.steps())
    throw ParameterError("denoiser: level " + std::to_string(t) +
                         " outside [0, " + std::to_string(s.steps() - 1) +
                         "]");
}

struct Propagated {
  double scale;   // sqrt(abar_t), multiplies the prior mean
  double var;     // sigma_t^2
  double k;       // k_{t+1}
  double pred;    // k^2 sigma_t^2 + beta_{t+1}
};

Propagated propagate(const Schedule &s, int t, double prior_var) {
  const double abar = s.alpha_bar(t);
  Propagated p;
  p.scale = std::sqrt(abar);
  p.var = abar * prior_var + (1.0 - abar);
  p.k = s.k(t + 1);
  p.pred = p.k * p.k * p.var + s.beta(t + 1);
  return p;
}

} // namespace

void validate(const GaussianPrior &prior) {
  if (!(prior.variance > 0.0) || !std::isfinite(prior.variance))
    throw ParameterError("gaussian prior: variance must be positive");
  if (prior.mean.size() == 0 || !prior.mean.all_finite())
    throw ParameterError("gaussian prior: mean must be a finite image");
}

void validate(const GmmPrior &prior) {
  if (prior.components.empty())
    throw ParameterError("gmm prior: no components");
  double total = 0.0;
  for (const auto &c : prior.components) {
    if (!(c.weight > 0.0))
      throw ParameterError("gmm prior: weights must be positive");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance))
      throw ParameterError("gmm prior: variances must be positive");
    if (c.mean.size() == 0 || !c.mean.all_finite())
      throw ParameterError("gmm prior: component mean must be a finite image");
    require_same_shape(c.mean, prior.components.front().mean, "gmm prior");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ParameterError("gmm prior: weights must sum to 1");
}

ImageField draw_prior(const GaussianPrior &prior, Rng &rng) {
  validate(prior);
  ImageField x = prior.mean;
  x.data() += std::sqrt(prior.variance) * standard_normal(x.size(), rng);
  return x;
}

ImageField draw_prior(const GmmPrior &prior, Rng &rng) {
  validate(prior);
  std::vector<double> weights;
  for (const auto &c : prior.components)
    weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const auto &c = prior.components[pick(rng)];
  ImageField x = c.mean;
  x.data() += std::sqrt(c.variance) * standard_normal(x.size(), rng);
  return x;
}

GaussianPriorDenoiser::GaussianPriorDenoiser(GaussianPrior prior,
                                             Schedule schedule)
    : prior_(std::move(prior)), schedule_(std::move(schedule)) {
  validate(prior_);
}

ImageField GaussianPriorDenoiser::mean(int t, const ImageField &x_next) const {
  check_t(t, schedule_);
  require_same_shape(x_next, prior_.mean, "gaussian denoiser");
  const Propagated p = propagate(schedule_, t, prior_.variance);
  const double gain = p.k * p.var / p.pred;
  const Vector level_mean = p.scale * prior_.mean.data();
  Vector out = level_mean + gain * (x_next.data() - p.k * level_mean);
  return ImageField(x_next.height(), x_next.width(), std::move(out));
}

std::optional<double> GaussianPriorDenoiser::exact_v_back(int t) const {
  check_t(t, schedule_);
  const Propagated p = propagate(schedule_, t, prior_.variance);
  return p.var * schedule_.beta(t + 1) / p.pred;
}

GmmPriorDenoiser::GmmPriorDenoiser(GmmPrior prior, Schedule schedule)
    : prior_(std::move(prior)), schedule_(std::move(schedule)) {
  validate(prior_);
}

std::vector<double>
GmmPriorDenoiser::responsibilities(int t, const ImageField &x_next) const {
  check_t(t, schedule_);
  const double npix = double(x_next.size());
  std::vector<double> logw;
  logw.reserve(prior_.components.size());
  for (const auto &c : prior_.components) {
    require_same_shape(x_next, c.mean, "gmm denoiser");
    const Propagated p = propagate(schedule_, t, c.variance);
    const double dist2 =
        (x_next.data() - (p.k * p.scale) * c.mean.data()).squaredNorm();
    logw.push_back(std::log(c.weight) -
                   0.5 * npix * std::log(2.0 * std::numbers::pi * p.pred) -
                   0.5 * dist2 / p.pred);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double norm = 0.0;
  for (double &v : logw) {
    v = std::exp(v - top);
    norm += v;
  }
  for (double &v : logw)
    v /= norm;
  return logw;
}

ImageField GmmPriorDenoiser::mean(int t, const ImageField &x_next) const {
  const std::vector<double> resp = responsibilities(t, x_next);
  Vector out = Vector::Zero(x_next.size());
  for (std::size_t j = 0; j < prior_.components.size(); ++j) {
    const auto &c = prior_.components[j];
    const Propagated p = propagate(schedule_, t, c.variance);
    const double gain = p.k * p.var / p.pred;
    const Vector level_mean = p.scale * c.mean.data();
    out += resp[j] * (level_mean + gain * (x_next.data() - p.k * level_mean));
  }
  return ImageField(x_next.height(), x_next.width(), std::move(out));
}

CountingDenoiser::CountingDenoiser(std::shared_ptr<const Denoiser> inner)
    : inner_(std::move(inner)) {
  if (!inner_)
    throw ParameterError("counting denoiser: null inner denoiser");
}

ImageField CountingDenoiser::mean(int t, const ImageField &x_next) const {
  calls_.fetch_add(1);
  return inner_->mean(t, x_next);
}

std::optional<double> CountingDenoiser::exact_v_back(int t) const {
  return inner_->exact_v_back(t);
}

} // namespace gdps
