#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/parallel.hpp"
#include "pnpsvgd/posterior.hpp"
#include "pnpsvgd/samplers.hpp"
#include "pnpsvgd/stats.hpp"

using namespace pnpsvgd;

namespace {

PosteriorModel small_model(std::size_t nt, std::size_t nx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const LinOp g = post_stack_operator(ricker_wavelet(25.0, 0.004, 5));
  const Grid2D truth = oracle::random_grid(nt, nx, rng);
  return PosteriorModel(g, apply(g, truth), {10.0, 0.1, 0.1, 1e-3});
}

oracle::GaussianDensity gaussian_1d(double mean) {
  return oracle::GaussianDensity(oracle::MatrixXd::Identity(1, 1), oracle::VectorXd::Constant(1, mean), Shape{1, 1});
}

}  // namespace

TEST(CosineStep, Endpoints) {
  EXPECT_DOUBLE_EQ(cosine_step(0, 50, 1e-2, 1e-4), 1e-2);
  EXPECT_DOUBLE_EQ(cosine_step(50, 50, 1e-2, 1e-4), 1e-4);
  EXPECT_NEAR(cosine_step(25, 50, 1e-2, 1e-4), (1e-2 + 1e-4) / 2.0, 1e-17);
}

TEST(CosineStep, MonotoneAndRangeChecked) {
  for (std::size_t t = 1; t <= 50; ++t) EXPECT_LE(cosine_step(t, 50, 1.0, 0.1), cosine_step(t - 1, 50, 1.0, 0.1));
  EXPECT_THROW(cosine_step(51, 50, 1.0, 0.1), InvalidArgument);
  EXPECT_THROW(cosine_step(0, 0, 1.0, 0.1), InvalidArgument);
}

TEST(SvgdStep, SingleParticleIsGradientAscent) {
  const PosteriorModel model = small_model(6, 3, 1);
  std::mt19937_64 rng(2);
  const Grid2D m = oracle::random_grid(6, 3, rng);
  const Ensemble e(1, m.shape(), m.values());
  const double eta = 0.01;
  const Ensemble next = svgd_step(e, model, eta);
  const Grid2D g = model.grad_log_posterior(m);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(next.data()[i], m.flat()[i] + eta * g.flat()[i]);
}

TEST(SvgdStep, ZeroStepLeavesEnsembleUnchanged) {
  const PosteriorModel model = small_model(6, 3, 3);
  const Ensemble e = init_ensemble(Grid2D(6, 3), 1.0, 8, 4);
  EXPECT_EQ(svgd_step(e, model, 0.0), e);
}

TEST(SvgdStep, LiteralSignFlipsTheUpdate) {
  const PosteriorModel model = small_model(6, 3, 5);
  const Ensemble e = init_ensemble(Grid2D(6, 3), 1.0, 5, 6);
  const Ensemble up = svgd_step(e, model, 1e-3, false), down = svgd_step(e, model, 1e-3, true);
  for (std::size_t i = 0; i < e.data().size(); ++i)
    EXPECT_NEAR(up.data()[i] - e.data()[i], e.data()[i] - down.data()[i], 1e-14);
}

TEST(SvgdStep, NonFiniteGradientNamesParticle) {
  const PosteriorModel model = small_model(4, 2, 7);
  Ensemble e = init_ensemble(Grid2D(4, 2), 1.0, 5, 8);
  e.particle(3)[2] = std::numeric_limits<double>::infinity();
  try {
    svgd_step(e, model, 0.1);
    FAIL() << "expected a numerical failure";
  } catch (const NumericalFailure& ex) {
    EXPECT_NE(std::string(ex.what()).find("particle 3"), std::string::npos) << ex.what();
  }
}

TEST(SvgdStep, IndependentOfThreadCount) {
  const PosteriorModel model = small_model(10, 4, 9);
  const Ensemble e = init_ensemble(Grid2D(10, 4), 1.0, 12, 10);
  const std::size_t saved = max_threads();
  set_max_threads(1);
  const Ensemble a = pnp_svgd_step(e, model, 0.01, DenoiserSpec::tv_prox(0.05));
  set_max_threads(4);
  const Ensemble b = pnp_svgd_step(e, model, 0.01, DenoiserSpec::tv_prox(0.05));
  set_max_threads(saved);
  EXPECT_EQ(a, b);
}

TEST(Svgd, OneDimensionalGaussianMoments) {
  const auto target = gaussian_1d(3.0);
  SamplerConfig cfg;
  cfg.n_particles = 200;
  cfg.n_iters = 2000;
  cfg.eta_max = cfg.eta_min = 0.05;
  cfg.schedule = Schedule::Constant;
  cfg.trace_every = 0;
  const Ensemble init = init_ensemble(Grid2D(1, 1, 0.0), 1.0, 200, 11);
  const auto [out, trace] = run_sampler(cfg, target, init);
  const double mean = ensemble_mean(out)(0, 0);
  const double sd = ensemble_std(out)(0, 0);
  EXPECT_NEAR(mean, 3.0, 0.05 * 3.0);
  EXPECT_NEAR(sd * sd, 1.0, 0.15);
  EXPECT_TRUE(trace.records.empty());
}

TEST(PnpSvgdStep, IdentityDenoiserIsBitIdentical) {
  const PosteriorModel model = small_model(8, 4, 12);
  const Ensemble e = init_ensemble(Grid2D(8, 4), 0.5, 10, 13);
  EXPECT_EQ(pnp_svgd_step(e, model, 0.02, DenoiserSpec::identity()), svgd_step(e, model, 0.02));
  EXPECT_EQ(pnp_svgd_step(e, model, 0.02, DenoiserSpec::gaussian(1.0).with_strength(0.0)),
            svgd_step(e, model, 0.02));
}

TEST(PnpSvgdStep, ZeroStepIsPureDenoise) {
  const PosteriorModel model = small_model(8, 4, 14);
  const Ensemble e = init_ensemble(Grid2D(8, 4), 0.5, 6, 15);
  const Ensemble out = pnp_svgd_step(e, model, 0.0, DenoiserSpec::gaussian(1.2));
  for (std::size_t i = 0; i < e.n(); ++i) EXPECT_EQ(out.particle_grid(i), gaussian_denoise(e.particle_grid(i), 1.2));
}

TEST(PnpSvgdStep, DenoiserContractsSpread) {
  const PosteriorModel model = small_model(12, 6, 16);
  SamplerConfig cfg;
  cfg.n_particles = 20;
  cfg.n_iters = 10;
  cfg.eta_max = 1e-3;
  cfg.eta_min = 1e-4;
  cfg.denoiser = DenoiserSpec::gaussian(1.0);
  const Ensemble init = init_ensemble(Grid2D(12, 6), 0.5, 20, 17);
  const auto [out, trace] = run_sampler(cfg, model, init);
  std::vector<double> ratio;
  const Grid2D s0 = ensemble_std(init), s1 = ensemble_std(out);
  for (std::size_t i = 0; i < s0.size(); ++i) ratio.push_back(s1.flat()[i] / s0.flat()[i]);
  std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
  EXPECT_LE(ratio[ratio.size() / 2], 1.0);
}

TEST(RunSampler, SingleIterationUsesEtaMax) {
  const PosteriorModel model = small_model(5, 2, 18);
  SamplerConfig cfg;
  cfg.n_particles = 4;
  cfg.n_iters = 1;
  cfg.eta_max = 0.02;
  cfg.eta_min = 0.001;
  const Ensemble init = init_ensemble(Grid2D(5, 2), 1.0, 4, 19);
  const auto [out, trace] = run_sampler(cfg, model, init);
  EXPECT_EQ(out, svgd_step(init, model, 0.02));
  ASSERT_EQ(trace.records.size(), 2u);
  EXPECT_EQ(trace.records[1].eta, 0.02);
  EXPECT_EQ(trace.records[1].iteration, 1u);
}

TEST(RunSampler, DeterministicAndTraced) {
  const PosteriorModel model = small_model(8, 3, 20);
  SamplerConfig cfg;
  cfg.n_particles = 10;
  cfg.n_iters = 7;
  cfg.trace_every = 3;
  cfg.eta_max = 1e-3;
  const Ensemble init = init_ensemble(Grid2D(8, 3), 1.0, 10, 21);
  const auto a = run_sampler(cfg, model, init);
  const auto b = run_sampler(cfg, model, init);
  EXPECT_EQ(a.first, b.first);
  std::vector<std::size_t> its;
  for (const auto& r : a.second.records) its.push_back(r.iteration);
  EXPECT_EQ(its, (std::vector<std::size_t>{0, 3, 6, 7}));
}

TEST(RunSampler, SingleParticleTracksGradientAscent) {
  const PosteriorModel model = small_model(6, 2, 22);
  SamplerConfig cfg;
  cfg.n_particles = 1;
  cfg.n_iters = 20;
  cfg.eta_max = 5e-3;
  cfg.eta_min = 1e-4;
  cfg.trace_every = 0;
  std::mt19937_64 rng(23);
  Grid2D m = oracle::random_grid(6, 2, rng);
  const auto [out, trace] = run_sampler(cfg, model, Ensemble(1, m.shape(), m.values()));
  for (std::size_t t = 0; t < cfg.n_iters; ++t) {
    const double eta = step_size(cfg, t);
    const Grid2D g = model.grad_log_posterior(m);
    for (std::size_t i = 0; i < m.size(); ++i) m.flat()[i] += eta * g.flat()[i];
  }
  EXPECT_EQ(out.particle_grid(0), m);
}

TEST(RunSampler, MisfitDecreasesOnQuadraticTarget) {
  std::mt19937_64 rng(24);
  const LinOp g = post_stack_operator(ricker_wavelet(25.0, 0.004, 5));
  const Grid2D truth = oracle::random_grid(10, 4, rng);
  const PosteriorModel model(g, apply(g, truth), {1.0, 0.05, 0.0, 1e-8});
  SamplerConfig cfg;
  cfg.n_particles = 16;
  cfg.n_iters = 30;
  cfg.eta_max = 0.05;
  cfg.eta_min = 0.005;
  const auto [out, trace] = run_sampler(cfg, model, init_ensemble(Grid2D(10, 4), 1.0, 16, 25));
  EXPECT_LT(trace.records.back().mean_misfit, trace.records.front().mean_misfit);
}

TEST(RunSampler, RejectsShapeMismatch) {
  const PosteriorModel model = small_model(5, 2, 26);
  SamplerConfig cfg;
  cfg.n_particles = 2;
  EXPECT_THROW(run_sampler(cfg, model, init_ensemble(Grid2D(5, 3), 1.0, 2, 1)), ShapeError);
  cfg.eta_min = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(InitEnsemble, ZeroVarianceCopiesMean) {
  std::mt19937_64 rng(27);
  const Grid2D mean = oracle::random_grid(4, 3, rng);
  const Ensemble e = init_ensemble(mean, 0.0, 5, 28);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(e.particle_grid(i), mean);
}

TEST(InitEnsemble, PriorVarianceAtPaperScale) {
  const Ensemble e = init_ensemble(Grid2D(10, 10, 8.5), 0.5, 100, 29);
  const Grid2D sd = ensemble_std(e);
  // Sample variance over 99 degrees of freedom has standard error 0.5 * sqrt(2 / 99).
  const double se = 0.5 * std::sqrt(2.0 / 99.0);
  double pooled = 0.0;
  for (double s : sd.flat()) {
    EXPECT_NEAR(s * s, 0.5, 5.0 * se);
    pooled += s * s / 100.0;
  }
  EXPECT_NEAR(pooled, 0.5, 5.0 * se / 10.0);
  const Grid2D mean = ensemble_mean(e);
  for (double m : mean.flat()) EXPECT_NEAR(m, 8.5, 5.0 * std::sqrt(0.5 / 100.0));
}

TEST(InitEnsemble, Reproducible) {
  const Ensemble a = init_ensemble(Grid2D(3, 3), 1.0, 4, 30);
  const Ensemble b = init_ensemble(Grid2D(3, 3), 1.0, 4, 30);
  const Ensemble c = init_ensemble(Grid2D(3, 3), 1.0, 4, 31);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}
