#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "pnpsvgd/config.hpp"
#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/matrix_io.hpp"

using namespace pnpsvgd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pnpsvgd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Grid2D random_grid(std::size_t nt, std::size_t nx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Grid2D g(nt, nx);
  for (double& v : g.flat()) v = nd(rng);
  return g;
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(MatrixIo, RoundTripIsBitIdentical) {
  const fs::path dir = scratch_dir("roundtrip");
  Grid2D g = random_grid(5, 7, 1);
  g(0, 0) = -0.0;
  g(1, 1) = std::numeric_limits<double>::denorm_min();
  write_matrix(dir / "m.fm", g);
  const Grid2D back = read_matrix(dir / "m.fm");
  ASSERT_EQ(back.shape(), g.shape());
  EXPECT_EQ(std::memcmp(back.flat().data(), g.flat().data(), g.size() * sizeof(double)), 0);
  EXPECT_EQ(fs::file_size(dir / "m.fm"), 20u + 8u * 35u);
}

TEST(MatrixIo, OneByOneIs28Bytes) {
  const std::vector<double> v{3.5};
  const auto bytes = encode_matrix(1, 1, v);
  EXPECT_EQ(bytes.size(), 28u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FM01");
  EXPECT_EQ(bytes[4], 1u);
  for (int i = 5; i < 12; ++i) EXPECT_EQ(bytes[i], 0u);
}

TEST(MatrixIo, BadMagicIsFormatErrorAtZero) {
  auto bytes = encode_matrix(2, 2, std::vector<double>(4, 1.0));
  bytes[3] = '2';
  try {
    decode_matrix(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(MatrixIo, TruncationAndTrailingBytes) {
  auto bytes = encode_matrix(2, 3, std::vector<double>(6, 1.0));
  auto truncated = bytes;
  truncated.resize(bytes.size() - 1);
  EXPECT_THROW(decode_matrix(truncated), FormatError);
  auto header_only = bytes;
  header_only.resize(12);
  EXPECT_THROW(decode_matrix(header_only), FormatError);
  auto extra = bytes;
  extra.push_back(0);
  try {
    decode_matrix(extra);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), bytes.size());
  }
  EXPECT_THROW(decode_matrix(encode_matrix(0, 3, {})), FormatError);
}

TEST(MatrixIo, MissingFileIsIoError) {
  EXPECT_THROW(read_matrix(fs::temp_directory_path() / "pnpsvgd_definitely_missing.fm"), IoError);
}

TEST(MatrixIo, EnsembleWithShapeSidecar) {
  const fs::path dir = scratch_dir("ensemble");
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<double> v(3 * 12);
  for (double& x : v) x = nd(rng);
  const Ensemble e(3, Shape{4, 3}, v);
  write_ensemble(dir / "e.fm", e);
  EXPECT_EQ(read_text_file(dir / "e.fm.shape"), "4 3\n");
  EXPECT_EQ(read_ensemble(dir / "e.fm"), e);
  write_text_file(dir / "e.fm.shape", "5 3\n");
  EXPECT_THROW(read_ensemble(dir / "e.fm"), FormatError);
}

TEST(MatrixIo, PgmHeaderAndSize) {
  const fs::path dir = scratch_dir("pgm");
  write_pgm(dir / "a.pgm", random_grid(6, 4, 3));
  const std::string s = read_text_file(dir / "a.pgm");
  EXPECT_EQ(s.substr(0, 2), "P5");
  EXPECT_EQ(s.size(), std::string("P5\n4 6\n255\n").size() + 24);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  for (double v : {1.0 / 3.0, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  const RunConfig d;
  EXPECT_EQ(render_config(c), render_config(d));
  EXPECT_EQ(c.sampler.n_particles, 100u);
  EXPECT_EQ(c.sampler.n_iters, 50u);
  EXPECT_EQ(c.init_variance, 0.5);
  EXPECT_EQ(c.peak_freq, 8.0);
  EXPECT_EQ(c.noise_std, 1e-2);
  EXPECT_EQ(c.model.nt, 100u);
  EXPECT_EQ(c.model.nx, 60u);
}

TEST(Config, PaperRunScale) {
  const RunConfig c = parse_config("n_particles=100\nn_iters=50");
  EXPECT_EQ(c.sampler.n_particles, 100u);
  EXPECT_EQ(c.sampler.n_iters, 50u);
}

TEST(Config, TypeErrorNamesLine) {
  EXPECT_EQ(config_error_line("n_particles=abc"), 1);
  EXPECT_EQ(config_error_line("# comment\n\nseed=3\neta_max=fast\n"), 4);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_EQ(config_error_line("seed=1\nn_particle=10\n"), 2);
  EXPECT_EQ(config_error_line("no equals sign"), 1);
}

TEST(Config, ConstraintViolationsRejected) {
  EXPECT_EQ(config_error_line("pd_tau=1.0\npd_sigma=1.0\n"), 2);
  EXPECT_GT(config_error_line("denoiser=median\ndenoiser_window=4\n"), 0);
  EXPECT_GT(config_error_line("method=gibbs\n"), 0);
  EXPECT_GT(config_error_line("n_particles=0\n"), 0);
  EXPECT_GT(config_error_line("n_particles=-3\n"), 0);
}

TEST(Config, RenderParsesBackToSameValues) {
  const std::string text =
      "method=pnp-svgd\nseed=17\nnx=24\nnt=48\ndenoiser=tv_prox\ndenoiser_lambda=0.0375\ndata_weight=2500\n"
      "layers=0.25:1.5,0.75:2.5\nhist_locations=3:4;10:2\ntrace_indices=1,5\npd_denoiser_strength=0.3\n"
      "eta_max=0.125\nschedule=constant\n";
  const RunConfig c = parse_config(text);
  EXPECT_EQ(c.method, Method::PnpSvgd);
  EXPECT_EQ(c.model.interfaces.size(), 2u);
  EXPECT_EQ(c.hist_locations.size(), 2u);
  EXPECT_EQ(*c.data_weight, 2500.0);
  EXPECT_EQ(c.sampler.schedule, Schedule::Constant);
  const std::string rendered = render_config(c);
  EXPECT_EQ(render_config(parse_config(rendered)), rendered);
}

TEST(Config, HelpListsEveryRenderedKey) {
  const std::string help = config_help();
  const std::string rendered = render_config(RunConfig{});
  std::size_t pos = 0;
  while (pos < rendered.size()) {
    const std::size_t eq = rendered.find('=', pos);
    const std::size_t nl = rendered.find('\n', pos);
    const std::string key = rendered.substr(pos, eq - pos);
    EXPECT_NE(help.find(key), std::string::npos) << key;
    pos = nl + 1;
  }
}
