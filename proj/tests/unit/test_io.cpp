#include "gdps/config.hpp"
#include "gdps/errors.hpp"
#include "gdps/image_io.hpp"
#include "unit/scratch_dir.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>

using namespace gdps;
using test::ScratchDir;

namespace {

bool bit_identical(const ImageField &a, const ImageField &b) {
  return a.same_shape(b) &&
         std::memcmp(a.data().data(), b.data().data(),
                     sizeof(double) * std::size_t(a.size())) == 0;
}

} // namespace

TEST(ImageIo, F64RoundTripIsBitExact) {
  ScratchDir dir;
  Rng rng(1);
  ImageField img(3, 5, standard_normal(15, rng));
  img(0, 0) = -0.0;
  img(0, 1) = std::numeric_limits<double>::denorm_min();
  img(0, 2) = std::numeric_limits<double>::max();
  img(0, 3) = std::numeric_limits<double>::quiet_NaN();
  img(0, 4) = -std::numeric_limits<double>::infinity();
  write_f64(dir / "a.f64", img);
  EXPECT_TRUE(bit_identical(read_f64(dir / "a.f64"), img));
  EXPECT_TRUE(bit_identical(read_image(dir / "a.f64"), img));
  EXPECT_EQ(std::filesystem::file_size(dir / "a.f64"), 16u + 15u * 8u);
}

TEST(ImageIo, F64HeaderLayout) {
  ScratchDir dir;
  write_f64(dir / "a.f64", ImageField(2, 3, 1.0));
  const std::string bytes = test::slurp(dir / "a.f64");
  EXPECT_EQ(bytes.substr(0, 8), std::string("GDPSF64\0", 8));
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12], 3);
  // 1.0 little-endian: 00 .. 00 f0 3f
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 6]), 0xf0);
}

TEST(ImageIo, F64RejectsCorruptFiles) {
  ScratchDir dir;
  test::spit(dir / "magic.f64", std::string(24, 'x'));
  EXPECT_THROW(read_f64(dir / "magic.f64"), IoError);
  write_f64(dir / "ok.f64", ImageField(2, 2, 0.5));
  std::string bytes = test::slurp(dir / "ok.f64");
  test::spit(dir / "short.f64", bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_f64(dir / "short.f64"), IoError);
  test::spit(dir / "long.f64", bytes + "z");
  EXPECT_THROW(read_f64(dir / "long.f64"), IoError);
  EXPECT_THROW(read_f64(dir / "missing.f64"), IoError);
  EXPECT_THROW(read_image(dir / "x.png"), IoError);
}

TEST(ImageIo, PgmScalesToFullRange) {
  ScratchDir dir;
  ImageField img(2, 3);
  img.data() << -1.0, 0.0, 1.0, 0.5, -0.5, 1.0;
  write_pgm(dir / "a.pgm", img);
  EXPECT_EQ(test::slurp(dir / "a.pgm"), "P2\n3 2\n255\n0 128 255\n191 64 255\n");
  const ImageField back = read_pgm(dir / "a.pgm");
  EXPECT_EQ(back.height(), 2);
  EXPECT_DOUBLE_EQ(back(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(back(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(back(1, 0), 191.0 / 255.0);

  write_pgm(dir / "flat.pgm", ImageField(1, 2, 7.0));
  EXPECT_EQ(test::slurp(dir / "flat.pgm"), "P2\n2 1\n255\n0 0\n");
}

TEST(ImageIo, PgmBinaryAndComments) {
  ScratchDir dir;
  test::spit(dir / "b.pgm", std::string("P5\n# comment\n2 1\n255\n") +
                                char(0) + char(255));
  const ImageField b = read_pgm(dir / "b.pgm");
  EXPECT_EQ(b.width(), 2);
  EXPECT_EQ(b(0, 0), 0.0);
  EXPECT_EQ(b(0, 1), 1.0);

  test::spit(dir / "w.pgm", std::string("P5 1 1 1000\n") + char(1) + char(244));
  EXPECT_DOUBLE_EQ(read_pgm(dir / "w.pgm")(0, 0), 0.5);

  test::spit(dir / "t.pgm", "P2 2 2 4 # note\n0 1\n2 4\n");
  EXPECT_DOUBLE_EQ(read_image(dir / "t.pgm")(1, 0), 0.5);

  test::spit(dir / "bad.pgm", "P2 2 2 4\n0 1 2 9\n");
  EXPECT_THROW(read_pgm(dir / "bad.pgm"), IoError);
  test::spit(dir / "p6.pgm", "P6 1 1 255\n");
  EXPECT_THROW(read_pgm(dir / "p6.pgm"), IoError);
}

// ------------------------------------------------------------------ config

TEST(Config, Defaults) {
  ScratchDir dir;
  const ExperimentConfig c = parse_config(Json::object(), dir.path());
  EXPECT_EQ(c.height, 32);
  EXPECT_EQ(c.make_schedule().steps(), kDefaultSteps);
  EXPECT_EQ(c.make_operator().kind(), OperatorKind::convolution);
  EXPECT_DOUBLE_EQ(c.noise_variance, 0.0025);
  EXPECT_TRUE(c.gaussian_prior().has_value());
  EXPECT_EQ(c.run.trace_pixels.size(), 3u);
  EXPECT_EQ(c.output, dir.path() / "gdps_out");
}

TEST(Config, ParsesEverySection) {
  ScratchDir dir;
  write_f64(dir / "m.f64", ImageField(4, 6, 0.25));
  const Json doc = Json::parse(R"({
    "seed": 18446744073709551615, "output": "res",
    "image": {"height": 4, "width": 6},
    "schedule": {"betas": [0.1, 0.2]},
    "prior": {"type": "gmm", "components": [
       {"weight": 0.25, "mean": "m.f64", "variance": 0.01},
       {"weight": 0.75, "mean": 0.8, "variance": 0.02}]},
    "operator": {"type": "mask", "kept": [0, 5, 23]},
    "noise": {"sigma_e": 0.1},
    "run": {"chains": 2, "max_sweeps": 300, "burn_in": 10,
            "stop_threshold": 0.001, "stop_check_every": 5,
            "trace_pixels": [[3, 5]], "trace_thin": 3,
            "sweep_order": "random", "oracle_compare": false},
    "sample_prior": {"count": 4}})");
  const ExperimentConfig c = parse_config(doc, dir.path());
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.make_schedule().steps(), 2);
  EXPECT_EQ(c.make_operator().range_size(), 3);
  EXPECT_NEAR(c.noise_variance, 0.01, 1e-17);
  EXPECT_FALSE(c.gaussian_prior().has_value());
  const GmmPrior g = c.gmm_prior();
  EXPECT_EQ(g.components[0].mean(1, 1), 0.25);
  EXPECT_EQ(c.run.chains, 2);
  EXPECT_EQ(c.run.sweep_order, SweepOrder::random_scan);
  EXPECT_EQ(c.run.trace_pixels, (std::vector<Pixel>{{3, 5}}));
  EXPECT_EQ(c.prior_samples, 4);
  EXPECT_EQ(c.output, dir.path() / "res");
}

TEST(Config, CanonicalFormRoundTrips) {
  ScratchDir dir;
  write_f64(dir / "m.f64", ImageField(8, 8, 0.3));
  const Json doc = Json::parse(R"({
    "seed": 3, "image": {"height": 8, "width": 8},
    "schedule": {"T": 10, "beta_min": 0.05, "beta_max": 0.5},
    "prior": {"type": "gaussian", "m0": "m.f64", "s0sq": 0.04},
    "operator": {"type": "conv", "psf": [[0.1, 0.2], [0.3, 0.4]]},
    "noise": {"v_e": 0.0025}})");
  const Json canon = to_json(parse_config(doc, dir.path()));
  EXPECT_EQ(to_json(parse_config(canon, "/nonexistent")), canon);
  EXPECT_EQ(canon["prior"]["m0"], (dir / "m.f64").string());
}

TEST(Config, ManifestIsAcceptedAsConfig) {
  ScratchDir dir;
  Json cfg = to_json(parse_config(Json{{"seed", 11}}, dir.path()));
  const Json manifest{{"kind", "gdps-manifest"}, {"config", cfg}, {"sweeps_run", 5}};
  EXPECT_EQ(parse_config(manifest, dir.path()).seed, 11u);
}

TEST(Config, RejectsBadDocuments) {
  ScratchDir dir;
  const auto bad = [&](const char *text) {
    EXPECT_THROW(parse_config(Json::parse(text), dir.path()), ConfigError) << text;
  };
  bad(R"({"sead": 1})");
  bad(R"({"run": {"max_sweep": 10}})");
  bad(R"({"image": {"height": 0}})");
  bad(R"({"seed": -1})");
  bad(R"({"seed": 1.5})");
  bad(R"({"schedule": {"T": 10, "beta_min": 0.5, "beta_max": 0.1}})");
  bad(R"({"schedule": {"betas": [0.1], "T": 1}})");
  bad(R"({"prior": {"type": "laplace"}})");
  bad(R"({"prior": {"type": "gaussian", "s0sq": 0}})");
  bad(R"({"prior": {"type": "gmm", "components": [{"weight": 0.5, "mean": 0, "variance": 1}]}})");
  bad(R"({"prior": {"type": "gaussian", "m0": "nowhere.f64"}})");
  bad(R"({"operator": {"type": "conv"}})");
  bad(R"({"operator": {"type": "mask", "kept": [0, 0]}})");
  bad(R"({"operator": {"type": "mask", "kept": [5000]}})");
  bad(R"({"noise": {"v_e": 0.1, "sigma_e": 0.1}})");
  bad(R"({"noise": {"v_e": -1}})");
  bad(R"({"truth": "absent.pgm"})");
  bad(R"({"run": {"burn_in": 100, "max_sweeps": 100}})");
  bad(R"({"run": {"trace_pixels": [[32, 0]]}})");
  bad(R"({"run": {"sweep_order": "sideways"}})");
  bad(R"([1, 2])");
  EXPECT_THROW(load_config(dir / "none.json"), ConfigError);
  test::spit(dir / "broken.json", "{\"seed\": ");
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
}

TEST(Config, ImagePriorShapeIsChecked) {
  ScratchDir dir;
  write_f64(dir / "m.f64", ImageField(3, 3, 0.3));
  EXPECT_THROW(parse_config(Json::parse(R"({"image": {"height": 4, "width": 4},
                 "prior": {"type": "gaussian", "m0": "m.f64"}})"),
                            dir.path()),
               ConfigError);
}

TEST(Config, LoadResolvesRelativeToFile) {
  ScratchDir dir;
  std::filesystem::create_directories(dir / "sub");
  write_f64(dir / "sub" / "t.f64", ImageField(32, 32, 0.1));
  test::spit(dir / "sub" / "c.json", R"({"truth": "t.f64", "output": "o"})");
  const ExperimentConfig c = load_config(dir / "sub" / "c.json");
  EXPECT_EQ(c.truth, dir / "sub" / "t.f64");
  EXPECT_EQ(c.output, dir / "sub" / "o");
}
