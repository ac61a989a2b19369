#include "gdps/diagnostics.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace gdps {

std::vector<double> autocorrelation(const std::vector<double> &values,
                                    std::size_t max_lag) {
  const std::size_t n = values.size();
  if (max_lag < 1 || n <= max_lag)
    throw ParameterError("autocorrelation: need trace length > max_lag >= 1");
  double mean = 0.0;
  for (double v : values)
    mean += v;
  mean /= double(n);

  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i)
    centred[i] = values[i] - mean;

  std::vector<double> rho(max_lag + 1, 0.0);
  double c0 = 0.0;
  for (double v : centred)
    c0 += v * v;
  rho[0] = 1.0;
  if (c0 <= 0.0)
    return rho;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      acc += centred[i] * centred[i + lag];
    rho[lag] = acc / c0;
  }
  return rho;
}

long first_lag_below(const std::vector<double> &rho, double threshold) {
  for (std::size_t lag = 0; lag < rho.size(); ++lag)
    if (rho[lag] < threshold)
      return long(lag);
  return -1;
}

double integrated_autocorrelation_time(const std::vector<double> &values,
                                       double window_factor) {
  const std::size_t n = values.size();
  if (n < 4)
    throw ParameterError("iact: trace too short");
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / double(n);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i)
    centred[i] = values[i] - mean;
  double c0 = 0.0;
  for (double v : centred)
    c0 += v * v;
  if (c0 <= 0.0)
    return 1.0;
  // lags are evaluated lazily; the window usually closes long before n/2
  double tau = 1.0;
  for (std::size_t w = 1; w <= n / 2; ++w) {
    double acc = 0.0;
    for (std::size_t i = 0; i + w < n; ++i)
      acc += centred[i] * centred[i + w];
    tau += 2.0 * acc / c0;
    if (double(w) >= window_factor * tau)
      break;
  }
  return std::max(tau, 1e-12);
}

std::vector<double> running_mean_curve(const std::vector<double> &values) {
  std::vector<double> curve(values.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mean += (values[i] - mean) / double(i + 1);
    curve[i] = mean;
  }
  return curve;
}

Coverage coverage_check(const ImageField &truth, const ImageField &mean,
                        const ImageField &psd) {
  require_same_shape(truth, mean, "coverage_check");
  require_same_shape(truth, psd, "coverage_check");
  Coverage out;
  out.flags.resize(std::size_t(truth.size()));
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool ok =
        std::abs(truth.data()[i] - mean.data()[i]) <= 2.0 * psd.data()[i];
    out.flags[std::size_t(i)] = ok;
    hits += ok ? 1 : 0;
  }
  out.fraction = truth.size() ? double(hits) / double(truth.size()) : 0.0;
  return out;
}

Coverage coverage_check(const ImageField &truth, const RunReport &report) {
  return coverage_check(truth, report.posterior_mean, report.psd);
}

namespace {

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

Histogram freedman_diaconis_histogram(const std::vector<double> &values) {
  if (values.empty())
    throw ParameterError("histogram: empty input");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const double width = 2.0 * iqr / std::cbrt(double(sorted.size()));

  std::size_t bins = 1;
  if (width > 0.0 && hi > lo)
    bins = std::max<std::size_t>(1, std::size_t(std::ceil((hi - lo) / width)));
  Histogram h;
  h.counts.assign(bins, 0);
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t b = 0; b <= bins; ++b)
    h.edges.push_back(lo + span * double(b) / double(bins));
  for (double v : sorted) {
    std::size_t b = std::size_t((v - lo) / span * double(bins));
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

void write_trace_csv(std::ostream &out, const PixelTrace &trace) {
  out << "sweep,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.values.size(); ++i)
    out << trace.sweeps[i] << ',' << trace.values[i] << '\n';
}

void write_autocorrelation_csv(std::ostream &out,
                               const std::vector<double> &rho) {
  out << "lag,rho\n";
  out.precision(17);
  for (std::size_t lag = 0; lag < rho.size(); ++lag)
    out << lag << ',' << rho[lag] << '\n';
}

void write_histogram_csv(std::ostream &out, const Histogram &hist) {
  out << "left,right,count\n";
  out.precision(17);
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    out << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.counts[b]
        << '\n';
}

void write_running_mean_csv(std::ostream &out, const PixelTrace &trace) {
  const std::vector<double> curve = running_mean_curve(trace.values);
  out << "sweep,running_mean\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << trace.sweeps[i] << ',' << curve[i] << '\n';
}

void write_summary_csv(std::ostream &out, const std::vector<Pixel> &pixels,
                       const ImageField *truth, const RunReport &report) {
  out << "row,col,true,estimate,error,psd,covered\n";
  out.precision(17);
  for (const auto &p : pixels) {
    const double est = report.posterior_mean(p.row, p.col);
    const double psd = report.psd(p.row, p.col);
    out << p.row << ',' << p.col << ',';
    if (truth) {
      const double tv = (*truth)(p.row, p.col);
      const double err = std::abs(tv - est);
      out << tv << ',' << est << ',' << err << ',' << psd << ','
          << (err <= 2.0 * psd ? 1 : 0) << '\n';
    } else {
      out << ',' << est << ",," << psd << ",\n";
    }
  }
}

} // namespace gdps
