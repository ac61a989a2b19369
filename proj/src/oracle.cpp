#include "gdps/oracle.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gdps::oracle {

void DenseGaussian::validate() const {
  if (covariance.rows() != covariance.cols() ||
      covariance.rows() != mean.size())
    throw DimensionError("dense gaussian: inconsistent sizes");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale)
    throw NumericalError("dense gaussian: covariance not symmetric");
  Eigen::LLT<MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw NumericalError("dense gaussian: covariance not positive definite");
}

namespace {

MatrixXd spd_inverse(const MatrixXd &m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("oracle: matrix not positive definite");
  MatrixXd inv = llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

} // namespace

DenseGaussian exact_posterior(const MatrixXd &H, double noise_variance,
                              const DenseGaussian &prior, const VectorXd &y) {
  if (H.cols() != prior.mean.size() || H.rows() != y.size())
    throw DimensionError("exact_posterior: inconsistent sizes");
  if (!(noise_variance > 0.0))
    throw ParameterError("exact_posterior: noise variance must be positive");
  const MatrixXd prior_precision = spd_inverse(prior.covariance);
  const MatrixXd precision =
      H.transpose() * H / noise_variance + prior_precision;
  DenseGaussian post;
  post.covariance = spd_inverse(precision);
  post.mean = post.covariance * (H.transpose() * y / noise_variance +
                                 prior_precision * prior.mean);
  return post;
}

DenseGaussian posterior_by_joint_conditioning(const MatrixXd &H,
                                              double noise_variance,
                                              const DenseGaussian &prior,
                                              const VectorXd &y) {
  const Index p = prior.mean.size();
  const Index m = y.size();
  DenseGaussian joint;
  joint.mean.resize(p + m);
  joint.mean << prior.mean, H * prior.mean;
  joint.covariance.resize(p + m, p + m);
  const MatrixXd cross = prior.covariance * H.transpose();
  joint.covariance.topLeftCorner(p, p) = prior.covariance;
  joint.covariance.topRightCorner(p, m) = cross;
  joint.covariance.bottomLeftCorner(m, p) = cross.transpose();
  joint.covariance.bottomRightCorner(m, m) =
      H * prior.covariance * H.transpose() +
      noise_variance * MatrixXd::Identity(m, m);
  std::vector<Index> observed(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i)
    observed[std::size_t(i)] = p + i;
  return condition(joint, observed, y);
}

DenseGaussian marginal(const DenseGaussian &joint,
                       const std::vector<Index> &keep) {
  DenseGaussian out;
  const Index n = Index(keep.size());
  out.mean.resize(n);
  out.covariance.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.mean[i] = joint.mean[keep[std::size_t(i)]];
    for (Index j = 0; j < n; ++j)
      out.covariance(i, j) =
          joint.covariance(keep[std::size_t(i)], keep[std::size_t(j)]);
  }
  return out;
}

DenseGaussian condition(const DenseGaussian &joint,
                        const std::vector<Index> &observed,
                        const VectorXd &values) {
  if (Index(observed.size()) != values.size())
    throw DimensionError("condition: values do not match observed indices");
  std::vector<Index> free;
  for (Index i = 0; i < joint.mean.size(); ++i)
    if (std::find(observed.begin(), observed.end(), i) == observed.end())
      free.push_back(i);

  const DenseGaussian a = marginal(joint, free);
  const DenseGaussian b = marginal(joint, observed);
  MatrixXd cross(Index(free.size()), Index(observed.size()));
  for (Index i = 0; i < cross.rows(); ++i)
    for (Index j = 0; j < cross.cols(); ++j)
      cross(i, j) =
          joint.covariance(free[std::size_t(i)], observed[std::size_t(j)]);

  Eigen::LDLT<MatrixXd> ldlt(b.covariance);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("condition: observed covariance is singular");
  DenseGaussian out;
  out.mean = a.mean + cross * ldlt.solve(values - b.mean);
  out.covariance = a.covariance - cross * ldlt.solve(cross.transpose());
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

double log_density(const DenseGaussian &g, const VectorXd &x) {
  Eigen::LLT<MatrixXd> llt(g.covariance);
  if (llt.info() != Eigen::Success)
    throw NumericalError("log_density: covariance not positive definite");
  const VectorXd z = llt.matrixL().solve(x - g.mean);
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * z.squaredNorm() - 0.5 * logdet -
         0.5 * double(x.size()) * std::log(2.0 * std::numbers::pi);
}

DenseGaussian forward_chain_joint(const Schedule &s, double prior_mean,
                                  double prior_variance) {
  const int T = s.steps();
  const Index n = T + 1;
  DenseGaussian joint;
  joint.mean.resize(n);
  joint.covariance.resize(n, n);
  // x_t = k_t x_{t-1} + sqrt(beta_t) w_t, built one level at a time:
  // Cov(x_t, x_s) = k_t Cov(x_{t-1}, x_s) for s < t.
  joint.mean[0] = prior_mean;
  joint.covariance(0, 0) = prior_variance;
  for (Index t = 1; t < n; ++t) {
    const double k = std::sqrt(1.0 - s.beta(int(t)));
    joint.mean[t] = k * joint.mean[t - 1];
    for (Index j = 0; j < t; ++j) {
      joint.covariance(t, j) = k * joint.covariance(t - 1, j);
      joint.covariance(j, t) = joint.covariance(t, j);
    }
    joint.covariance(t, t) =
        k * k * joint.covariance(t - 1, t - 1) + s.beta(int(t));
  }
  return joint;
}

ScalarGaussian dense_chain_conditional(const Schedule &s, int t,
                                       const VectorXd &levels,
                                       double prior_mean,
                                       double prior_variance) {
  const int T = s.steps();
  if (T > 20)
    throw ParameterError("dense_chain_conditional: T must be <= 20");
  if (t < 0 || t > T)
    throw ParameterError("dense_chain_conditional: level out of range");
  if (levels.size() != T + 1)
    throw DimensionError("dense_chain_conditional: need T+1 level values");
  const DenseGaussian joint = forward_chain_joint(s, prior_mean, prior_variance);
  std::vector<Index> observed;
  VectorXd values(T);
  for (int i = 0; i <= T; ++i)
    if (i != t) {
      values[Index(observed.size())] = levels[i];
      observed.push_back(i);
    }
  const DenseGaussian cond = condition(joint, observed, values);
  return {cond.mean[0], cond.covariance(0, 0)};
}

MatrixXd dense_circulant(int height, int width,
                         const std::vector<std::vector<double>> &psf) {
  const Index n = Index(height) * width;
  MatrixXd H = MatrixXd::Zero(n, n);
  const int kh = int(psf.size());
  const int kw = int(psf.front().size());
  auto wrap = [](int i, int m) { return ((i % m) + m) % m; };
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      for (int a = 0; a < kh; ++a)
        for (int b = 0; b < kw; ++b) {
          const int rr = wrap(r - (a - kh / 2), height);
          const int cc = wrap(c - (b - kw / 2), width);
          H(Index(r) * width + c, Index(rr) * width + cc) += psf[a][b];
        }
  return H;
}

std::vector<MixtureComponent>
gmm_posterior_1d(const std::vector<MixtureComponent> &prior, double h,
                 double noise_variance, double y) {
  if (prior.empty())
    throw ParameterError("gmm_posterior_1d: empty prior");
  if (!(noise_variance > 0.0))
    throw ParameterError("gmm_posterior_1d: noise variance must be positive");
  std::vector<MixtureComponent> post;
  std::vector<double> logw;
  for (const auto &c : prior) {
    const double precision = h * h / noise_variance + 1.0 / c.variance;
    MixtureComponent p;
    p.variance = 1.0 / precision;
    p.mean = p.variance * (h * y / noise_variance + c.mean / c.variance);
    // evidence N(y; h m, h^2 s^2 + v_e)
    const double ev = h * h * c.variance + noise_variance;
    logw.push_back(std::log(c.weight) - 0.5 * std::log(2 * std::numbers::pi * ev) -
                   0.5 * (y - h * c.mean) * (y - h * c.mean) / ev);
    post.push_back(p);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double norm = 0.0;
  for (double &w : logw)
    norm += (w = std::exp(w - top));
  for (std::size_t j = 0; j < post.size(); ++j)
    post[j].weight = logw[j] / norm;
  return post;
}

double mixture_mean(const std::vector<MixtureComponent> &mixture) {
  double m = 0.0;
  for (const auto &c : mixture)
    m += c.weight * c.mean;
  return m;
}

double mixture_variance(const std::vector<MixtureComponent> &mixture) {
  const double m = mixture_mean(mixture);
  double v = 0.0;
  for (const auto &c : mixture)
    v += c.weight * (c.variance + (c.mean - m) * (c.mean - m));
  return v;
}

} // namespace gdps::oracle
