#pragma once

#include "gdps/denoiser.hpp"
#include "gdps/operators.hpp"
#include "gdps/sampler.hpp"
#include "gdps/schedule.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gdps {

using Json = nlohmann::ordered_json;

// A scalar, or the path of an image file with the experiment's shape.
struct ScalarOrImage {
  double value = 0.0;
  std::filesystem::path path; // empty when scalar
};

struct ScheduleSpec {
  // A linear ramp, unless an explicit list is given (possibly empty: T = 0).
  int steps = kDefaultSteps;
  double beta_min = kDefaultBetaMin;
  double beta_max = kDefaultBetaMax;
  std::optional<std::vector<double>> betas;
};

struct GmmComponentSpec {
  double weight = 1.0;
  ScalarOrImage mean;
  double variance = 1.0;
};

struct PriorSpec {
  enum class Kind { gaussian, gmm } kind = Kind::gaussian;
  ScalarOrImage m0{0.5, {}};
  double s0sq = 0.04;
  std::vector<GmmComponentSpec> components;
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::convolution;
  Kernel psf = uniform_psf(3);
  std::vector<Eigen::Index> kept;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output = "gdps_out";
  int height = 32;
  int width = 32;
  ScheduleSpec schedule;
  PriorSpec prior;
  OperatorSpec op;
  double noise_variance = 0.0025;
  std::filesystem::path truth;       // optional
  std::filesystem::path measurement; // optional
  RunConfig run;
  bool oracle_compare = false;
  int prior_samples = 16;

  Schedule make_schedule() const;
  LinearOperator make_operator() const;
  std::shared_ptr<const Denoiser> make_denoiser(const Schedule &s) const;
  /// The prior as a Gaussian when it is one.
  std::optional<GaussianPrior> gaussian_prior() const;
  GmmPrior gmm_prior() const;
};

/// Parses a config document. Relative paths resolve against base_dir and
/// must exist. A run manifest is accepted and yields its embedded config.
ExperimentConfig parse_config(const Json &doc,
                              const std::filesystem::path &base_dir);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical form of a config: every field explicit, absolute paths.
/// parse_config(to_json(c), any) reproduces c.
Json to_json(const ExperimentConfig &config);

} // namespace gdps
