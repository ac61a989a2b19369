#include "gdps/experiment.hpp"

#include "gdps/diffusion.hpp"
#include "gdps/errors.hpp"
#include "gdps/image_io.hpp"
#include "gdps/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace gdps {

namespace {

enum Stream : std::uint64_t { kTruth = 1, kNoise = 2, kChains = 3, kPrior = 4 };

constexpr double kLagThreshold = 0.1;
constexpr std::size_t kMaxLag = 200;

fs::path prepare_output(const ExperimentConfig &config) {
  std::error_code ec;
  fs::create_directories(config.output, ec);
  if (ec)
    throw IoError("cannot create " + config.output.string() + ": " +
                  ec.message());
  return config.output;
}

std::ofstream open_text(const fs::path &path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path &path, const Json &j) {
  std::ofstream out = open_text(path);
  out << j.dump(2) << '\n';
}

void write_image_pair(const fs::path &dir, const std::string &stem,
                      const ImageField &image) {
  write_f64(dir / (stem + ".f64"), image);
  write_pgm(dir / (stem + ".pgm"), image);
}

std::string trace_stem(const PixelTrace &t) {
  return "r" + std::to_string(t.pixel.row) + "_c" + std::to_string(t.pixel.col) +
         "_chain" + std::to_string(t.chain);
}

// Values recorded after burn-in.
std::vector<double> kept_values(const PixelTrace &t, int burn_in) {
  std::vector<double> out;
  for (std::size_t i = 0; i < t.values.size(); ++i)
    if (t.sweeps[i] > burn_in)
      out.push_back(t.values[i]);
  return out;
}

TraceDiagnostics summarize(const std::string &name,
                           const std::vector<double> &xs) {
  TraceDiagnostics d;
  d.file = name;
  d.samples = xs.size();
  if (xs.empty())
    return d;
  double m = 0.0;
  for (double x : xs)
    m += x;
  m /= double(xs.size());
  double v = 0.0;
  for (double x : xs)
    v += (x - m) * (x - m);
  d.mean = m;
  d.sd = xs.size() > 1 ? std::sqrt(v / double(xs.size() - 1)) : 0.0;
  if (xs.size() >= 4) {
    d.iact = integrated_autocorrelation_time(xs);
    d.lag_below = first_lag_below(
        autocorrelation(xs, std::min(kMaxLag, xs.size() - 1)), kLagThreshold);
  }
  return d;
}

void write_diagnostics_csv(const fs::path &path,
                           const std::vector<TraceDiagnostics> &rows) {
  std::ofstream out = open_text(path);
  out.precision(17);
  out << "file,samples,mean,sd,iact,lag_below_0.1\n";
  for (const auto &r : rows)
    out << r.file << ',' << r.samples << ',' << r.mean << ',' << r.sd << ','
        << r.iact << ',' << r.lag_below << '\n';
}

Eigen::MatrixXd dense_operator(const ExperimentConfig &config,
                               const LinearOperator &op) {
  const Eigen::Index n = op.domain_size();
  switch (op.kind()) {
  case OperatorKind::identity:
    return Eigen::MatrixXd::Identity(n, n);
  case OperatorKind::convolution:
    return oracle::dense_circulant(config.height, config.width, op.psf());
  case OperatorKind::mask: {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(op.range_size(), n);
    for (std::size_t i = 0; i < op.kept().size(); ++i)
      H(Eigen::Index(i), op.kept()[i]) = 1.0;
    return H;
  }
  }
  throw ConfigError("operator: unknown kind");
}

OracleComparison compare_with_oracle(const ExperimentConfig &config,
                                     const LinearOperator &op, const Vector &y,
                                     const RunReport &report,
                                     const fs::path &dir) {
  const auto prior = config.gaussian_prior();
  if (!prior)
    throw ConfigError("run.oracle_compare: needs a gaussian prior");
  const Eigen::Index n = op.domain_size();
  if (n > kDenseLimit)
    throw ConfigError("run.oracle_compare: image too large for the dense oracle");
  const oracle::DenseGaussian p{prior->mean.data(),
                                prior->variance * Eigen::MatrixXd::Identity(n, n)};
  const auto post = oracle::exact_posterior(dense_operator(config, op),
                                            config.noise_variance, p, y);
  const ImageField mean(config.height, config.width, post.mean);
  const ImageField sd(config.height, config.width, post.stddev());
  write_image_pair(dir, "oracle_mean", mean);
  write_image_pair(dir, "oracle_psd", sd);

  OracleComparison c;
  const Vector diff = report.posterior_mean.data() - post.mean;
  c.max_abs_mean_deviation = diff.cwiseAbs().maxCoeff();
  c.relative_l2_mean_error = diff.norm() / post.mean.norm();
  c.max_relative_psd_deviation =
      ((report.psd.data() - sd.data()).array() / sd.data().array())
          .abs()
          .maxCoeff();
  return c;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                    std::uint32_t(stream), 0x65787074u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[1]) << 32) | words[0];
}

ImageField measurement_image(const ExperimentConfig &config, const Vector &y) {
  if (config.op.kind == OperatorKind::mask)
    return ImageField(1, int(y.size()), y);
  return ImageField(config.height, config.width, y);
}

ExperimentData prepare_data(const ExperimentConfig &config) {
  const LinearOperator op = config.make_operator();
  ExperimentData data;
  if (!config.truth.empty()) {
    ImageField truth = read_image(config.truth);
    if (truth.height() != config.height || truth.width() != config.width)
      throw ConfigError("truth: image " + config.truth.string() +
                        " does not match the experiment shape");
    data.truth = std::move(truth);
  } else if (config.measurement.empty()) {
    Rng rng(derive_seed(config.seed, kTruth));
    if (auto g = config.gaussian_prior())
      data.truth = draw_prior(*g, rng);
    else
      data.truth = draw_prior(config.gmm_prior(), rng);
  }

  if (!config.measurement.empty()) {
    const ImageField m = read_image(config.measurement);
    const ImageField expected = measurement_image(config, Vector(op.range_size()));
    if (!m.same_shape(expected))
      throw ConfigError("measurement: image " + config.measurement.string() +
                        " does not match the operator range");
    data.y = m.data();
  } else {
    data.y = simulate_measurement(op, *data.truth, NoiseModel{config.noise_variance},
                                  derive_seed(config.seed, kNoise));
  }
  return data;
}

ExperimentData cli_forward(const ExperimentConfig &config) {
  ExperimentData data = prepare_data(config);
  const fs::path dir = prepare_output(config);
  if (data.truth)
    write_image_pair(dir, "truth", *data.truth);
  write_f64(dir / "measurement.f64", measurement_image(config, data.y));
  // masks are viewed through the back-projection
  write_pgm(dir / "measurement.pgm",
            config.op.kind == OperatorKind::mask
                ? config.make_operator().adjoint(data.y)
                : measurement_image(config, data.y));
  Json info;
  info["seed"] = config.seed;
  info["truth_seed"] = derive_seed(config.seed, kTruth);
  info["noise_seed"] = derive_seed(config.seed, kNoise);
  info["noise_variance"] = config.noise_variance;
  info["config"] = to_json(config);
  write_json(dir / "forward.json", info);
  return data;
}

PriorSampleSummary cli_sample_prior(const ExperimentConfig &config) {
  const Schedule s = config.make_schedule();
  const auto den = config.make_denoiser(s);
  const fs::path dir = prepare_output(config);
  Rng rng(derive_seed(config.seed, kPrior));

  PriorSampleSummary out;
  const Eigen::Index n = Eigen::Index(config.height) * config.width;
  Vector sum = Vector::Zero(n), sumsq = Vector::Zero(n);
  for (int i = 0; i < config.prior_samples; ++i) {
    ImageField x0 =
        ancestral_sample(s, *den, config.height, config.width, rng)[0];
    char stem[32];
    std::snprintf(stem, sizeof stem, "sample_%03d", i);
    write_image_pair(dir, stem, x0);
    sum += x0.data();
    sumsq += x0.data().cwiseAbs2();
    out.samples.push_back(std::move(x0));
  }

  const double count = double(config.prior_samples);
  {
    std::ofstream csv = open_text(dir / "prior_moments.csv");
    csv.precision(17);
    csv << "row,col,mean,variance\n";
    for (int r = 0; r < config.height; ++r)
      for (int c = 0; c < config.width; ++c) {
        const Eigen::Index i = Eigen::Index(r) * config.width + c;
        const double m = sum[i] / count;
        const double v =
            count > 1 ? (sumsq[i] - count * m * m) / (count - 1) : 0.0;
        csv << r << ',' << c << ',' << m << ',' << v << '\n';
      }
  }

  const double total = count * double(n);
  out.mean = sum.sum() / total;
  out.variance = total > 1 ? (sumsq.sum() - total * out.mean * out.mean) / (total - 1)
                           : 0.0;
  Json info;
  info["samples"] = config.prior_samples;
  info["mean"] = out.mean;
  info["variance"] = out.variance;
  if (auto g = config.gaussian_prior()) {
    info["expected_mean"] = g->mean.data().mean();
    info["expected_variance"] = g->variance;
  }
  info["config"] = to_json(config);
  write_json(dir / "prior_summary.json", info);
  return out;
}

RunOutcome cli_run(const ExperimentConfig &config) {
  const ExperimentData data = prepare_data(config);
  const Schedule s = config.make_schedule();
  GdpsProblem problem{config.make_operator(), NoiseModel{config.noise_variance},
                      s, config.make_denoiser(s), data.y};
  RunConfig rc = config.run;
  rc.seed = derive_seed(config.seed, kChains);

  RunOutcome out;
  out.report = run(problem, rc);
  const RunReport &rep = out.report;
  const fs::path dir = prepare_output(config);

  write_image_pair(dir, "posterior_mean", rep.posterior_mean);
  write_image_pair(dir, "psd", rep.psd);
  write_f64(dir / "measurement.f64", measurement_image(config, data.y));
  if (data.truth) {
    write_image_pair(dir, "truth", *data.truth);
    out.coverage = coverage_check(*data.truth, rep);
  }

  std::vector<TraceDiagnostics> diag;
  for (const auto &t : rep.traces) {
    const std::string stem = trace_stem(t);
    {
      std::ofstream f = open_text(dir / ("trace_" + stem + ".csv"));
      write_trace_csv(f, t);
    }
    {
      std::ofstream f = open_text(dir / ("running_mean_" + stem + ".csv"));
      write_running_mean_csv(f, t);
    }
    const std::vector<double> xs = kept_values(t, rc.burn_in);
    if (xs.size() >= 2) {
      std::ofstream f = open_text(dir / ("autocorr_" + stem + ".csv"));
      write_autocorrelation_csv(f, autocorrelation(xs, std::min(kMaxLag, xs.size() - 1)));
      std::ofstream h = open_text(dir / ("histogram_" + stem + ".csv"));
      write_histogram_csv(h, freedman_diaconis_histogram(xs));
    }
    diag.push_back(summarize("trace_" + stem + ".csv", xs));
  }
  write_diagnostics_csv(dir / "diagnostics.csv", diag);

  {
    std::vector<Pixel> all;
    for (int r = 0; r < config.height; ++r)
      for (int c = 0; c < config.width; ++c)
        all.push_back({r, c});
    std::ofstream f = open_text(dir / "summary.csv");
    write_summary_csv(f, all, data.truth ? &*data.truth : nullptr, rep);
  }

  if (config.oracle_compare)
    out.oracle = compare_with_oracle(config, problem.op, data.y, rep, dir);

  const Json cfg = to_json(config);
  write_json(dir / "config.json", cfg);

  Json m;
  m["kind"] = "gdps-manifest";
  m["config"] = cfg;
  m["seed"] = config.seed;
  m["chain_seed_base"] = rc.seed;
  m["stop_rule"] = {{"threshold", rc.stop_threshold},
                    {"check_every", rc.stop_check_every},
                    {"burn_in", rc.burn_in},
                    {"max_sweeps", rc.max_sweeps}};
  m["sweeps_run"] = rep.sweeps_run;
  m["chain_sweeps"] = rep.chain_sweeps;
  m["samples_used"] = rep.samples_used;
  m["converged"] = rep.converged;
  m["wall_time_seconds"] = rep.wall_time_seconds;
  if (out.coverage)
    m["coverage_fraction"] = out.coverage->fraction;
  if (out.oracle)
    m["oracle"] = {{"max_abs_mean_deviation", out.oracle->max_abs_mean_deviation},
                   {"relative_l2_mean_error", out.oracle->relative_l2_mean_error},
                   {"max_relative_psd_deviation",
                    out.oracle->max_relative_psd_deviation}};
  write_json(dir / "manifest.json", m);
  return out;
}

std::vector<TraceDiagnostics> cli_diagnose(const fs::path &dir) {
  if (!fs::is_directory(dir))
    throw ConfigError("diagnose: not a directory: " + dir.string());
  int burn_in = 0;
  if (fs::exists(dir / "manifest.json")) {
    std::ifstream in(dir / "manifest.json");
    try {
      const Json m = Json::parse(in);
      burn_in = m.at("stop_rule").at("burn_in").get<int>();
    } catch (const Json::exception &e) {
      throw ConfigError("diagnose: unreadable manifest: " + std::string(e.what()));
    }
  }

  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<TraceDiagnostics> rows;
  for (const auto &path : files) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (line != "sweep,value")
      throw IoError("diagnose: bad trace header in " + path.string());
    std::vector<double> xs;
    while (std::getline(in, line)) {
      if (line.empty())
        continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw IoError("diagnose: bad trace row in " + path.string());
      try {
        if (std::stol(line.substr(0, comma)) > burn_in)
          xs.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception &) {
        throw IoError("diagnose: bad trace row in " + path.string());
      }
    }
    rows.push_back(summarize(path.filename().string(), xs));
  }
  write_diagnostics_csv(dir / "diagnostics.csv", rows);

  if (fs::exists(dir / "truth.f64") && fs::exists(dir / "posterior_mean.f64") &&
      fs::exists(dir / "psd.f64")) {
    const Coverage c = coverage_check(read_f64(dir / "truth.f64"),
                                      read_f64(dir / "posterior_mean.f64"),
                                      read_f64(dir / "psd.f64"));
    write_json(dir / "coverage.json",
               Json{{"coverage_fraction", c.fraction},
                    {"pixels", c.flags.size()}});
  }
  return rows;
}

} // namespace gdps
