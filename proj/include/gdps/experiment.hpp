#pragma once

// End-to-end experiment drivers behind the command-line tool. Each writes
// its artifacts under config.output and returns what it computed.

#include "gdps/config.hpp"
#include "gdps/diagnostics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gdps {

/// Independent seed for a named purpose, derived from the experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct ExperimentData {
  std::optional<ImageField> truth;
  Vector y;
};

/// Ground truth from config.truth or a prior draw; measurement from
/// config.measurement or simulated from the truth. Deterministic in the
/// config.
ExperimentData prepare_data(const ExperimentConfig &config);

/// The measurement as an image file: h x w for circulant operators, 1 x M
/// for masks.
ImageField measurement_image(const ExperimentConfig &config, const Vector &y);

// forward: truth.{f64,pgm}, measurement.{f64,pgm}, forward.json
ExperimentData cli_forward(const ExperimentConfig &config);

struct PriorSampleSummary {
  std::vector<ImageField> samples;
  double mean = 0.0;     // over all pixels and samples
  double variance = 0.0; // unbiased, same pooling
};

// sample-prior: sample_NNN.{f64,pgm}, prior_moments.csv, prior_summary.json
PriorSampleSummary cli_sample_prior(const ExperimentConfig &config);

struct OracleComparison {
  double max_abs_mean_deviation = 0.0;
  double relative_l2_mean_error = 0.0;
  double max_relative_psd_deviation = 0.0;
};

struct RunOutcome {
  RunReport report;
  std::optional<Coverage> coverage;
  std::optional<OracleComparison> oracle;
};

// run: posterior_mean / psd images, per-trace CSVs, summary.csv,
// config.json and manifest.json (plus oracle_* images when requested)
RunOutcome cli_run(const ExperimentConfig &config);

struct TraceDiagnostics {
  std::string file;
  std::size_t samples = 0;
  double mean = 0.0;
  double sd = 0.0;
  double iact = 0.0;
  long lag_below = -1; // first lag with rho < 0.1
};

/// Re-derives chain statistics from the trace_*.csv files of a run output
/// directory; writes diagnostics.csv (and coverage.json when the directory
/// holds a truth image).
std::vector<TraceDiagnostics> cli_diagnose(const std::filesystem::path &dir);

} // namespace gdps
