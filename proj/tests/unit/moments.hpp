#pragma once

#include <cmath>
#include <vector>

// Sample-moment helpers shared by the Monte Carlo tests.
namespace gdps::test {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n = 0;

  double mean_se() const { return std::sqrt(variance / double(n)); }
  // Standard error of the sample variance for Gaussian data.
  double variance_se() const {
    return variance * std::sqrt(2.0 / double(n - 1));
  }
};

inline Moments moments(const std::vector<double> &xs) {
  Moments m;
  m.n = xs.size();
  for (double x : xs)
    m.mean += x;
  m.mean /= double(m.n);
  for (double x : xs)
    m.variance += (x - m.mean) * (x - m.mean);
  m.variance /= double(m.n - 1);
  return m;
}

inline double covariance(const std::vector<double> &a,
                         const std::vector<double> &b) {
  const Moments ma = moments(a), mb = moments(b);
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    c += (a[i] - ma.mean) * (b[i] - mb.mean);
  return c / double(a.size() - 1);
}

} // namespace gdps::test
