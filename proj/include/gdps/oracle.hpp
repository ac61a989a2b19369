#pragma once

// Closed-form and brute-force reference computations. Nothing here uses the
// sampler, operator or denoiser code, so agreement with them is evidence.

#include "gdps/schedule.hpp"

#include <Eigen/Dense>

#include <vector>

namespace gdps::oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DenseGaussian {
  VectorXd mean;
  MatrixXd covariance;

  /// Symmetric within 1e-12 (relative to the largest entry) and
  /// Cholesky-factorizable; throws NumericalError otherwise.
  void validate() const;
  VectorXd stddev() const { return covariance.diagonal().cwiseSqrt(); }
};

struct ScalarGaussian {
  double mean = 0.0;
  double variance = 1.0;
};

/// Posterior of x under y = H x + e, e ~ N(0, v_e I), x ~ prior, via the
/// precision form H^T H / v_e + C^{-1}.
DenseGaussian exact_posterior(const MatrixXd &H, double noise_variance,
                              const DenseGaussian &prior, const VectorXd &y);

/// Same posterior by forming the joint law of (x, y) and conditioning on y.
DenseGaussian posterior_by_joint_conditioning(const MatrixXd &H,
                                              double noise_variance,
                                              const DenseGaussian &prior,
                                              const VectorXd &y);

/// Law of the indices in `keep`.
DenseGaussian marginal(const DenseGaussian &joint,
                       const std::vector<Index> &keep);

/// Law of the complement of `observed` given those entries equal `values`
/// (Schur complement). Remaining indices keep their relative order.
DenseGaussian condition(const DenseGaussian &joint,
                        const std::vector<Index> &observed,
                        const VectorXd &values);

double log_density(const DenseGaussian &g, const VectorXd &x);

/// Joint law of (x_0, ..., x_T) at one pixel under the forward chain with
/// x_0 ~ N(prior_mean, prior_variance).
DenseGaussian forward_chain_joint(const Schedule &s, double prior_mean,
                                  double prior_variance);

/// Law of level t at one pixel given every other level of the forward
/// chain. `levels` has length T+1; entry t is ignored. T <= 20.
ScalarGaussian dense_chain_conditional(const Schedule &s, int t,
                                       const VectorXd &levels,
                                       double prior_mean = 0.0,
                                       double prior_variance = 1.0);

/// Dense matrix of periodic convolution on a height x width grid; the PSF
/// element (rows/2, cols/2) sits on the output pixel.
MatrixXd dense_circulant(int height, int width,
                         const std::vector<std::vector<double>> &psf);

struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// Exact posterior of scalar x with mixture prior, y = h x + e.
std::vector<MixtureComponent>
gmm_posterior_1d(const std::vector<MixtureComponent> &prior, double h,
                 double noise_variance, double y);

double mixture_mean(const std::vector<MixtureComponent> &mixture);
double mixture_variance(const std::vector<MixtureComponent> &mixture);

} // namespace gdps::oracle
