// gdps: command-line front end.
//
//   gdps forward      --config cfg.json [--seed N] [--output DIR]
//   gdps sample-prior --config cfg.json [--seed N] [--output DIR]
//   gdps run          --config cfg.json [--seed N] [--output DIR]
//   gdps diagnose     --output DIR
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else.

#include "gdps/errors.hpp"
#include "gdps/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
};

void add_common(CLI::App *cmd, Common &c) {
  cmd->add_option("--config", c.config, "experiment config (JSON) or run manifest")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--output", c.output, "overrides the output directory");
}

gdps::ExperimentConfig load(const Common &c) {
  gdps::ExperimentConfig cfg = gdps::load_config(c.config);
  if (c.seed)
    cfg.seed = *c.seed;
  if (!c.output.empty())
    cfg.output = std::filesystem::absolute(c.output);
  return cfg;
}

int dispatch(CLI::App &app, CLI::App *forward, CLI::App *prior, CLI::App *runc,
             CLI::App *diag, const Common &common, const std::string &diag_dir) {
  if (*forward) {
    const auto cfg = load(common);
    const auto data = gdps::cli_forward(cfg);
    std::printf("forward: %lld measurements written to %s\n",
                static_cast<long long>(data.y.size()), cfg.output.c_str());
  } else if (*prior) {
    const auto cfg = load(common);
    const auto s = gdps::cli_sample_prior(cfg);
    std::printf("sample-prior: %zu samples, pooled mean %.6g, variance %.6g\n",
                s.samples.size(), s.mean, s.variance);
  } else if (*runc) {
    const auto cfg = load(common);
    const auto out = gdps::cli_run(cfg);
    const auto &r = out.report;
    std::printf("run: %d sweeps (%s), %.3f s, output %s\n", r.sweeps_run,
                r.converged ? "stopping rule met" : "sweep limit reached",
                r.wall_time_seconds, cfg.output.c_str());
    if (out.coverage)
      std::printf("coverage (|truth - mean| <= 2 psd): %.4f\n",
                  out.coverage->fraction);
    if (out.oracle)
      std::printf("oracle: max |mean dev| %.3g, rel L2 %.3g, max rel psd dev %.3g\n",
                  out.oracle->max_abs_mean_deviation,
                  out.oracle->relative_l2_mean_error,
                  out.oracle->max_relative_psd_deviation);
  } else if (*diag) {
    const auto rows = gdps::cli_diagnose(diag_dir);
    for (const auto &d : rows)
      std::printf("%s: n=%zu mean=%.6g sd=%.6g iact=%.3g lag<0.1 at %ld\n",
                  d.file.c_str(), d.samples, d.mean, d.sd, d.iact, d.lag_below);
  } else {
    std::cerr << app.help();
    return 2;
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Gibbs sampling for linear inverse problems with a diffusion prior"};
  app.require_subcommand(1);
  Common common;
  std::string diag_dir;
  CLI::App *forward = app.add_subcommand("forward", "simulate a measurement");
  CLI::App *prior =
      app.add_subcommand("sample-prior", "ancestral samples from the prior");
  CLI::App *runc = app.add_subcommand("run", "posterior sampling");
  CLI::App *diag =
      app.add_subcommand("diagnose", "recompute chain statistics of a run");
  for (CLI::App *cmd : {forward, prior, runc})
    add_common(cmd, common);
  diag->add_option("--output", diag_dir, "run output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(app, forward, prior, runc, diag, common, diag_dir);
  } catch (const gdps::NumericalError &e) {
    std::cerr << "gdps: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const gdps::IoError &e) {
    std::cerr << "gdps: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument &e) {
    // ConfigError, ParameterError, DimensionError
    std::cerr << "gdps: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const gdps::UnsupportedOperatorError &e) {
    std::cerr << "gdps: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "gdps: " << e.what() << '\n';
    return 1;
  }
}
