#include "gdps/config.hpp"

#include "gdps/errors.hpp"
#include "gdps/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace fs = std::filesystem;

namespace gdps {

namespace {

constexpr const char *kManifestKind = "gdps-manifest";

void check_keys(const Json &obj, std::initializer_list<const char *> allowed,
                const std::string &where) {
  if (!obj.is_object())
    throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &item : obj.items())
    if (!ok.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double get_number(const Json &v, const std::string &where) {
  if (!v.is_number())
    throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

long long get_integer(const Json &v, const std::string &where) {
  if (!v.is_number_integer())
    throw ConfigError(where + ": expected an integer");
  return v.get<long long>();
}

int get_int(const Json &v, const std::string &where, long long lo,
            long long hi) {
  const long long x = get_integer(v, where);
  if (x < lo || x > hi)
    throw ConfigError(where + ": " + std::to_string(x) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return int(x);
}

double positive(double x, const std::string &where) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw ConfigError(where + ": must be positive and finite");
  return x;
}

fs::path existing_path(const Json &v, const fs::path &base,
                       const std::string &where) {
  if (!v.is_string())
    throw ConfigError(where + ": expected a path string");
  fs::path p = v.get<std::string>();
  if (p.is_relative())
    p = base / p;
  p = p.lexically_normal();
  if (!fs::exists(p))
    throw ConfigError(where + ": no such file " + p.string());
  return fs::absolute(p);
}

ScalarOrImage scalar_or_image(const Json &v, const fs::path &base,
                              const std::string &where) {
  if (v.is_number())
    return {v.get<double>(), {}};
  return {0.0, existing_path(v, base, where)};
}

Json scalar_or_image_json(const ScalarOrImage &s) {
  return s.path.empty() ? Json(s.value) : Json(s.path.string());
}

ImageField materialize(const ScalarOrImage &s, int h, int w,
                       const std::string &where) {
  if (s.path.empty())
    return ImageField(h, w, s.value);
  ImageField img = read_image(s.path);
  if (img.height() != h || img.width() != w)
    throw ConfigError(where + ": image " + s.path.string() +
                      " does not match the experiment shape");
  return img;
}

SweepOrder parse_order(const Json &v) {
  if (v == "ascending")
    return SweepOrder::ascending;
  if (v == "descending")
    return SweepOrder::descending;
  if (v == "random")
    return SweepOrder::random_scan;
  throw ConfigError("run.sweep_order: expected ascending, descending or random");
}

const char *order_name(SweepOrder o) {
  switch (o) {
  case SweepOrder::ascending:
    return "ascending";
  case SweepOrder::descending:
    return "descending";
  case SweepOrder::random_scan:
    return "random";
  }
  return "?";
}

void parse_schedule(const Json &j, ScheduleSpec &s) {
  check_keys(j, {"T", "beta_min", "beta_max", "betas"}, "schedule");
  if (j.contains("betas")) {
    if (j.contains("T") || j.contains("beta_min") || j.contains("beta_max"))
      throw ConfigError("schedule: give either betas or T/beta_min/beta_max");
    if (!j["betas"].is_array())
      throw ConfigError("schedule.betas: expected an array");
    std::vector<double> betas;
    for (const auto &b : j["betas"])
      betas.push_back(get_number(b, "schedule.betas"));
    s.betas = std::move(betas);
    return;
  }
  if (j.contains("T"))
    s.steps = get_int(j["T"], "schedule.T", 1, 100000);
  if (j.contains("beta_min"))
    s.beta_min = get_number(j["beta_min"], "schedule.beta_min");
  if (j.contains("beta_max"))
    s.beta_max = get_number(j["beta_max"], "schedule.beta_max");
}

void parse_prior(const Json &j, PriorSpec &p, const fs::path &base) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("prior: missing type");
  if (j["type"] == "gaussian") {
    check_keys(j, {"type", "m0", "s0sq"}, "prior");
    p.kind = PriorSpec::Kind::gaussian;
    if (j.contains("m0"))
      p.m0 = scalar_or_image(j["m0"], base, "prior.m0");
    if (j.contains("s0sq"))
      p.s0sq = positive(get_number(j["s0sq"], "prior.s0sq"), "prior.s0sq");
  } else if (j["type"] == "gmm") {
    check_keys(j, {"type", "components"}, "prior");
    p.kind = PriorSpec::Kind::gmm;
    if (!j.contains("components") || !j["components"].is_array() ||
        j["components"].empty())
      throw ConfigError("prior.components: expected a non-empty array");
    p.components.clear();
    for (const auto &c : j["components"]) {
      check_keys(c, {"weight", "mean", "variance"}, "prior.components[]");
      if (!c.contains("weight") || !c.contains("mean") || !c.contains("variance"))
        throw ConfigError("prior.components[]: need weight, mean and variance");
      p.components.push_back(
          {positive(get_number(c["weight"], "weight"), "prior.components.weight"),
           scalar_or_image(c["mean"], base, "prior.components.mean"),
           positive(get_number(c["variance"], "variance"),
                    "prior.components.variance")});
    }
  } else {
    throw ConfigError("prior.type: expected gaussian or gmm");
  }
}

void parse_operator(const Json &j, OperatorSpec &op) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("operator: missing type");
  if (j["type"] == "identity") {
    check_keys(j, {"type"}, "operator");
    op.kind = OperatorKind::identity;
  } else if (j["type"] == "conv") {
    check_keys(j, {"type", "psf", "uniform"}, "operator");
    op.kind = OperatorKind::convolution;
    if (j.contains("psf") == j.contains("uniform"))
      throw ConfigError("operator: conv needs exactly one of psf, uniform");
    if (j.contains("uniform")) {
      op.psf = uniform_psf(get_int(j["uniform"], "operator.uniform", 1, 1000));
    } else {
      if (!j["psf"].is_array() || j["psf"].empty())
        throw ConfigError("operator.psf: expected a non-empty 2-D array");
      op.psf.clear();
      for (const auto &row : j["psf"]) {
        if (!row.is_array())
          throw ConfigError("operator.psf: expected a non-empty 2-D array");
        std::vector<double> r;
        for (const auto &v : row)
          r.push_back(get_number(v, "operator.psf"));
        op.psf.push_back(std::move(r));
      }
    }
  } else if (j["type"] == "mask") {
    check_keys(j, {"type", "kept"}, "operator");
    op.kind = OperatorKind::mask;
    if (!j.contains("kept") || !j["kept"].is_array())
      throw ConfigError("operator.kept: expected an array of pixel indices");
    op.kept.clear();
    for (const auto &v : j["kept"])
      op.kept.push_back(Eigen::Index(get_integer(v, "operator.kept")));
  } else {
    throw ConfigError("operator.type: expected identity, conv or mask");
  }
}

void parse_noise(const Json &j, double &variance) {
  check_keys(j, {"v_e", "sigma_e"}, "noise");
  if (j.contains("v_e") == j.contains("sigma_e"))
    throw ConfigError("noise: give exactly one of v_e, sigma_e");
  // zero is accepted for noiseless forward simulation; sampling rejects it
  const char *key = j.contains("v_e") ? "v_e" : "sigma_e";
  const double x = get_number(j[key], std::string("noise.") + key);
  if (!(x >= 0.0) || !std::isfinite(x))
    throw ConfigError(std::string("noise.") + key + ": must be >= 0 and finite");
  variance = j.contains("v_e") ? x : x * x;
}

void parse_run(const Json &j, ExperimentConfig &c) {
  check_keys(j,
             {"chains", "max_sweeps", "burn_in", "stop_threshold",
              "stop_check_every", "trace_pixels", "trace_thin", "sweep_order",
              "oracle_compare"},
             "run");
  RunConfig &r = c.run;
  if (j.contains("chains"))
    r.chains = get_int(j["chains"], "run.chains", 1, 1024);
  if (j.contains("max_sweeps"))
    r.max_sweeps = get_int(j["max_sweeps"], "run.max_sweeps", 1, 1 << 30);
  if (j.contains("burn_in"))
    r.burn_in = get_int(j["burn_in"], "run.burn_in", 0, 1 << 30);
  if (j.contains("stop_threshold"))
    r.stop_threshold = get_number(j["stop_threshold"], "run.stop_threshold");
  if (j.contains("stop_check_every"))
    r.stop_check_every =
        get_int(j["stop_check_every"], "run.stop_check_every", 1, 1 << 30);
  if (j.contains("trace_thin"))
    r.trace_thin = get_int(j["trace_thin"], "run.trace_thin", 1, 1 << 30);
  if (j.contains("sweep_order"))
    r.sweep_order = parse_order(j["sweep_order"]);
  if (j.contains("oracle_compare")) {
    if (!j["oracle_compare"].is_boolean())
      throw ConfigError("run.oracle_compare: expected true or false");
    c.oracle_compare = j["oracle_compare"].get<bool>();
  }
  if (j.contains("trace_pixels")) {
    if (!j["trace_pixels"].is_array())
      throw ConfigError("run.trace_pixels: expected [[row, col], ...]");
    r.trace_pixels.clear();
    for (const auto &p : j["trace_pixels"]) {
      if (!p.is_array() || p.size() != 2)
        throw ConfigError("run.trace_pixels: expected [[row, col], ...]");
      r.trace_pixels.push_back(
          {get_int(p[0], "run.trace_pixels", 0, c.height - 1),
           get_int(p[1], "run.trace_pixels", 0, c.width - 1)});
    }
  }
}

// Default monitored pixels: three spread along the diagonal.
std::vector<Pixel> default_trace_pixels(int h, int w) {
  std::vector<Pixel> out;
  for (int q = 1; q <= 3; ++q) {
    const Pixel p{q * h / 4, q * w / 4};
    if (std::find(out.begin(), out.end(), p) == out.end())
      out.push_back(p);
  }
  return out;
}

} // namespace

Schedule ExperimentConfig::make_schedule() const {
  if (schedule.betas)
    return Schedule::from_betas(*schedule.betas);
  return Schedule::linear_vp(schedule.steps, schedule.beta_min,
                             schedule.beta_max);
}

LinearOperator ExperimentConfig::make_operator() const {
  switch (op.kind) {
  case OperatorKind::identity:
    return LinearOperator::identity(height, width);
  case OperatorKind::convolution:
    return LinearOperator::convolution(height, width, op.psf);
  case OperatorKind::mask:
    return LinearOperator::mask(height, width, op.kept);
  }
  throw ConfigError("operator: unknown kind");
}

std::optional<GaussianPrior> ExperimentConfig::gaussian_prior() const {
  if (prior.kind != PriorSpec::Kind::gaussian)
    return std::nullopt;
  GaussianPrior g{materialize(prior.m0, height, width, "prior.m0"), prior.s0sq};
  validate(g);
  return g;
}

GmmPrior ExperimentConfig::gmm_prior() const {
  if (prior.kind != PriorSpec::Kind::gmm)
    throw ConfigError("prior: not a mixture");
  GmmPrior g;
  for (const auto &c : prior.components)
    g.components.push_back(
        {c.weight, materialize(c.mean, height, width, "prior.components.mean"),
         c.variance});
  validate(g);
  return g;
}

std::shared_ptr<const Denoiser>
ExperimentConfig::make_denoiser(const Schedule &s) const {
  if (auto g = gaussian_prior())
    return std::make_shared<GaussianPriorDenoiser>(std::move(*g), s);
  return std::make_shared<GmmPriorDenoiser>(gmm_prior(), s);
}

ExperimentConfig parse_config(const Json &doc, const fs::path &base_dir) {
  if (doc.is_object() && doc.contains("kind") && doc["kind"] == kManifestKind) {
    if (!doc.contains("config"))
      throw ConfigError("manifest: missing config");
    return parse_config(doc["config"], base_dir);
  }
  check_keys(doc,
             {"seed", "output", "image", "schedule", "prior", "operator", "noise",
              "truth", "measurement", "run", "sample_prior"},
             "config");
  ExperimentConfig c;
  if (doc.contains("seed")) {
    const Json &s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string())
      throw ConfigError("output: expected a path string");
    c.output = doc["output"].get<std::string>();
  }
  if (c.output.is_relative())
    c.output = fs::absolute(base_dir / c.output).lexically_normal();
  if (doc.contains("image")) {
    const Json &im = doc["image"];
    check_keys(im, {"height", "width"}, "image");
    if (im.contains("height"))
      c.height = get_int(im["height"], "image.height", 1, 1 << 15);
    if (im.contains("width"))
      c.width = get_int(im["width"], "image.width", 1, 1 << 15);
  }
  if (doc.contains("schedule"))
    parse_schedule(doc["schedule"], c.schedule);
  if (doc.contains("prior"))
    parse_prior(doc["prior"], c.prior, base_dir);
  if (doc.contains("operator"))
    parse_operator(doc["operator"], c.op);
  if (doc.contains("noise"))
    parse_noise(doc["noise"], c.noise_variance);
  if (doc.contains("truth"))
    c.truth = existing_path(doc["truth"], base_dir, "truth");
  if (doc.contains("measurement"))
    c.measurement = existing_path(doc["measurement"], base_dir, "measurement");
  c.run.trace_pixels = default_trace_pixels(c.height, c.width);
  if (doc.contains("run"))
    parse_run(doc["run"], c);
  if (doc.contains("sample_prior")) {
    check_keys(doc["sample_prior"], {"count"}, "sample_prior");
    if (doc["sample_prior"].contains("count"))
      c.prior_samples =
          get_int(doc["sample_prior"]["count"], "sample_prior.count", 1, 1 << 20);
  }

  // Fail fast on everything that can be checked without running.
  try {
    c.run.validate();
    const Schedule s = c.make_schedule();
    c.make_operator();
    c.make_denoiser(s);
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, fs::absolute(path).parent_path());
}

Json to_json(const ExperimentConfig &c) {
  Json j;
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  j["image"] = {{"height", c.height}, {"width", c.width}};
  if (c.schedule.betas)
    j["schedule"] = {{"betas", *c.schedule.betas}};
  else
    j["schedule"] = {{"T", c.schedule.steps},
                     {"beta_min", c.schedule.beta_min},
                     {"beta_max", c.schedule.beta_max}};
  if (c.prior.kind == PriorSpec::Kind::gaussian) {
    j["prior"] = {{"type", "gaussian"},
                  {"m0", scalar_or_image_json(c.prior.m0)},
                  {"s0sq", c.prior.s0sq}};
  } else {
    Json comps = Json::array();
    for (const auto &k : c.prior.components)
      comps.push_back({{"weight", k.weight},
                       {"mean", scalar_or_image_json(k.mean)},
                       {"variance", k.variance}});
    j["prior"] = {{"type", "gmm"}, {"components", comps}};
  }
  switch (c.op.kind) {
  case OperatorKind::identity:
    j["operator"] = {{"type", "identity"}};
    break;
  case OperatorKind::convolution:
    j["operator"] = {{"type", "conv"}, {"psf", c.op.psf}};
    break;
  case OperatorKind::mask: {
    Json kept = Json::array();
    for (auto k : c.op.kept)
      kept.push_back(std::int64_t(k));
    j["operator"] = {{"type", "mask"}, {"kept", kept}};
    break;
  }
  }
  j["noise"] = {{"v_e", c.noise_variance}};
  if (!c.truth.empty())
    j["truth"] = c.truth.string();
  if (!c.measurement.empty())
    j["measurement"] = c.measurement.string();
  Json pixels = Json::array();
  for (const auto &p : c.run.trace_pixels)
    pixels.push_back({p.row, p.col});
  j["run"] = {{"chains", c.run.chains},
              {"max_sweeps", c.run.max_sweeps},
              {"burn_in", c.run.burn_in},
              {"stop_threshold", c.run.stop_threshold},
              {"stop_check_every", c.run.stop_check_every},
              {"trace_pixels", pixels},
              {"trace_thin", c.run.trace_thin},
              {"sweep_order", order_name(c.run.sweep_order)},
              {"oracle_compare", c.oracle_compare}};
  j["sample_prior"] = {{"count", c.prior_samples}};
  return j;
}

} // namespace gdps
