#pragma once

#include "gdps/image.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace gdps {

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel &, const Pixel &) = default;
};

/// Values of one x_0 pixel across recorded sweeps of one chain.
struct PixelTrace {
  Pixel pixel;
  int chain = 0;
  std::vector<int> sweeps; // 1-based sweep index of each value
  std::vector<double> values;
};

struct RunReport {
  ImageField posterior_mean;
  ImageField psd; // per-pixel posterior standard deviation
  std::vector<PixelTrace> traces;
  int sweeps_run = 0;               // summed over chains
  std::vector<int> chain_sweeps;    // per chain
  std::size_t samples_used = 0;     // accumulated x_0 samples, all chains
  bool converged = false;           // every chain met the stopping rule
  double wall_time_seconds = 0.0;
};

/// Biased sample autocorrelation rho(l) = c(l)/c(0), l = 0..max_lag.
/// A constant trace yields rho(0) = 1 and zeros elsewhere.
std::vector<double> autocorrelation(const std::vector<double> &values,
                                    std::size_t max_lag);

/// First lag with rho(lag) < threshold, or -1 when none is found.
long first_lag_below(const std::vector<double> &rho, double threshold);

/// Integrated autocorrelation time 1 + 2 sum rho(l), summed over a window
/// chosen with Sokal's rule (smallest W with W >= c * tau(W)).
double integrated_autocorrelation_time(const std::vector<double> &values,
                                       double window_factor = 5.0);

/// Cumulative mean after each element.
std::vector<double> running_mean_curve(const std::vector<double> &values);

struct Coverage {
  std::vector<bool> flags; // per pixel, row-major
  double fraction = 0.0;
};

/// flag_p = |truth_p - mean_p| <= 2 psd_p.
Coverage coverage_check(const ImageField &truth, const RunReport &report);
Coverage coverage_check(const ImageField &truth, const ImageField &mean,
                        const ImageField &psd);

struct Histogram {
  std::vector<double> edges; // bins + 1
  std::vector<std::size_t> counts;
};

/// Freedman-Diaconis binning (bin width 2 IQR n^{-1/3}); falls back to a
/// single bin when the IQR vanishes.
Histogram freedman_diaconis_histogram(const std::vector<double> &values);

// CSV emitters.
void write_trace_csv(std::ostream &out, const PixelTrace &trace);
void write_autocorrelation_csv(std::ostream &out,
                               const std::vector<double> &rho);
void write_histogram_csv(std::ostream &out, const Histogram &hist);
void write_running_mean_csv(std::ostream &out, const PixelTrace &trace);

/// Per-pixel rows: row,col,true,estimate,error,psd,covered.
void write_summary_csv(std::ostream &out, const std::vector<Pixel> &pixels,
                       const ImageField *truth, const RunReport &report);

} // namespace gdps
