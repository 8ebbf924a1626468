#include <benchmark/benchmark.h>

#include <random>

#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/kernel.hpp"
#include "pnpsvgd/linops.hpp"
#include "pnpsvgd/posterior.hpp"
#include "pnpsvgd/samplers.hpp"

using namespace pnpsvgd;

namespace {

Grid2D random_grid(std::size_t nt, std::size_t nx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Grid2D g(nt, nx);
  for (double& v : g.flat()) v = nd(rng);
  return g;
}

LinOp forward_operator() { return post_stack_operator(ricker_wavelet(8.0, 0.004, 50)); }

// Grid size is passed as nx with nt = 100.
void BM_ForwardApply(benchmark::State& state) {
  const LinOp g = forward_operator();
  const Grid2D m = random_grid(100, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply(g, m));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.size()));
}
BENCHMARK(BM_ForwardApply)->Arg(20)->Arg(60);

void BM_AdjointApply(benchmark::State& state) {
  const LinOp g = forward_operator();
  const Grid2D d = random_grid(100, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(apply(g, d, true));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d.size()));
}
BENCHMARK(BM_AdjointApply)->Arg(20)->Arg(60);

void BM_PosteriorGradient(benchmark::State& state) {
  const LinOp g = forward_operator();
  const PosteriorModel model(g, random_grid(100, 60, 3));
  const Grid2D m = random_grid(100, 60, 4);
  for (auto _ : state) benchmark::DoNotOptimize(model.grad_log_posterior(m));
}
BENCHMARK(BM_PosteriorGradient);

// Ensemble size is the benchmark argument; particles live on a 100 x 60 grid.
void BM_KernelEval(benchmark::State& state) {
  const Ensemble e = init_ensemble(Grid2D(100, 60), 1.0, static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) {
    const double sigma = median_bandwidth(e);
    benchmark::DoNotOptimize(kernel_eval(e, sigma));
  }
}
BENCHMARK(BM_KernelEval)->Arg(25)->Arg(100);

void BM_SvgdStep(benchmark::State& state) {
  const LinOp g = forward_operator();
  const PosteriorModel model(g, random_grid(100, 60, 6));
  const Ensemble e = init_ensemble(Grid2D(100, 60, 2.0), 0.5, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(svgd_step(e, model, 1e-6));
}
BENCHMARK(BM_SvgdStep)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PnpSvgdStepTv(benchmark::State& state) {
  const LinOp g = forward_operator();
  const PosteriorModel model(g, random_grid(100, 60, 8));
  const Ensemble e = init_ensemble(Grid2D(100, 60, 2.0), 0.5, 100, 9);
  const DenoiserSpec den = DenoiserSpec::tv_prox(0.02);
  for (auto _ : state) benchmark::DoNotOptimize(pnp_svgd_step(e, model, 1e-6, den));
}
BENCHMARK(BM_PnpSvgdStepTv)->Unit(benchmark::kMillisecond);

void BM_TvProx(benchmark::State& state) {
  const Grid2D img = random_grid(100, 60, 10);
  const int iters = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tv_prox(img, 0.1, iters));
}
BENCHMARK(BM_TvProx)->Arg(50)->Arg(200);

void BM_GaussianDenoise(benchmark::State& state) {
  const Grid2D img = random_grid(100, 60, 11);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_denoise(img, 1.5));
}
BENCHMARK(BM_GaussianDenoise);

void BM_MedianDenoise(benchmark::State& state) {
  const Grid2D img = random_grid(100, 60, 12);
  for (auto _ : state) benchmark::DoNotOptimize(median_denoise(img, 3));
}
BENCHMARK(BM_MedianDenoise);

}  // namespace

BENCHMARK_MAIN();
