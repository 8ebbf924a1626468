#include "pnpsvgd/samplers.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/kernel.hpp"
#include "pnpsvgd/parallel.hpp"
#include "pnpsvgd/stats.hpp"

namespace pnpsvgd {

void SamplerConfig::validate() const {
  if (n_particles < 1) throw InvalidArgument("n_particles must be at least 1");
  if (n_iters < 1) throw InvalidArgument("n_iters must be at least 1");
  if (!(eta_max > 0.0) || !(eta_min > 0.0)) throw InvalidArgument("step sizes must be positive");
  if (eta_min > eta_max) throw InvalidArgument("eta_min must not exceed eta_max");
  if (denoiser) denoiser->validate();
}

double cosine_step(std::size_t t, std::size_t T, double eta_max, double eta_min) {
  if (T < 1) throw InvalidArgument("cosine_step: T must be at least 1");
  if (t > T) throw InvalidArgument("cosine_step: t out of range");
  if (t == 0) return eta_max;
  if (t == T) return eta_min;
  const double c = std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(T));
  return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + c);
}

double step_size(const SamplerConfig& cfg, std::size_t t) {
  if (cfg.schedule == Schedule::Constant) return cfg.eta_max;
  return cosine_step(t, cfg.n_iters, cfg.eta_max, cfg.eta_min);
}

Ensemble svgd_step(const Ensemble& e, const LogDensity& target, double eta, bool paper_literal_sign) {
  if (target.shape() != e.shape()) throw ShapeError("svgd_step: ensemble and target shapes differ");
  const std::size_t n = e.n();
  const std::size_t d = e.dim();

  std::vector<double> grads(n * d);
  parallel_for(n, [&](std::size_t i) {
    std::span<double> g(grads.data() + i * d, d);
    target.gradient(e.particle(i), g);
    for (double v : g) {
      if (!std::isfinite(v))
        throw NumericalFailure("non-finite log-density gradient at particle " + std::to_string(i));
    }
  });

  KernelEval ke;
  if (n >= 2) {
    const std::vector<double> sq = pairwise_sq_distances(e);
    ke = kernel_eval(e, median_bandwidth(sq, n), sq);
  } else {
    ke.sigma = 1.0;
    ke.k_matrix = {1.0};
    ke.grad_sums.assign(d, 0.0);
  }
  const std::vector<double> phi = phi_star(e, grads, ke);

  Ensemble next = e;
  const double step = paper_literal_sign ? -eta : eta;
  auto out = next.data();
  for (std::size_t i = 0; i < n * d; ++i) out[i] += step * phi[i];
  return next;
}

Ensemble pnp_svgd_step(const Ensemble& e, const LogDensity& target, double eta, const DenoiserSpec& den,
                       bool paper_literal_sign) {
  den.validate();
  Ensemble next = svgd_step(e, target, eta, paper_literal_sign);
  if (den.is_identity()) return next;
  parallel_for(next.n(), [&](std::size_t i) {
    Grid2D img;
    try {
      img = denoise(den, next.particle_grid(i));
    } catch (const std::exception& ex) {
      throw NumericalFailure("denoiser failed at particle " + std::to_string(i) + ": " + ex.what());
    }
    if (!img.all_finite()) throw NumericalFailure("denoiser produced non-finite values at particle " + std::to_string(i));
    std::copy(img.flat().begin(), img.flat().end(), next.particle(i).begin());
  });
  return next;
}

TraceRecord summarize(const Ensemble& e, const LogDensity& target, std::size_t iteration, double eta) {
  TraceRecord r;
  r.iteration = iteration;
  r.eta = eta;
  r.mean = ensemble_mean(e);
  r.std = e.n() >= 2 ? ensemble_std(e) : Grid2D(e.shape());
  std::vector<double> misfits(e.n());
  parallel_for(e.n(), [&](std::size_t i) { misfits[i] = target.misfit(e.particle(i)); });
  double total = 0.0;
  for (double m : misfits) total += m;
  r.mean_misfit = total / static_cast<double>(e.n());
  return r;
}

std::pair<Ensemble, RunTrace> run_sampler(const SamplerConfig& cfg, const LogDensity& target, const Ensemble& init) {
  cfg.validate();
  if (init.shape() != target.shape()) throw ShapeError("run_sampler: initial ensemble does not match the target");
  RunTrace trace;
  const bool tracing = cfg.trace_every > 0;
  if (tracing) trace.records.push_back(summarize(init, target, 0, 0.0));

  Ensemble current = init;
  for (std::size_t t = 0; t < cfg.n_iters; ++t) {
    const double eta = step_size(cfg, t);
    current = cfg.denoiser ? pnp_svgd_step(current, target, eta, *cfg.denoiser, cfg.paper_literal_sign)
                           : svgd_step(current, target, eta, cfg.paper_literal_sign);
    const std::size_t done = t + 1;
    if (tracing && (done % cfg.trace_every == 0 || done == cfg.n_iters))
      trace.records.push_back(summarize(current, target, done, eta));
  }
  return {std::move(current), std::move(trace)};
}

Ensemble init_ensemble(const Grid2D& mean, double variance, std::size_t n, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw InvalidArgument("init_ensemble: variance must be non-negative");
  if (n < 1) throw InvalidArgument("init_ensemble: need at least one particle");
  Ensemble e(n, mean.shape());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(variance);
  const auto mu = mean.flat();
  for (std::size_t i = 0; i < n; ++i) {
    auto p = e.particle(i);
    for (std::size_t l = 0; l < p.size(); ++l) p[l] = mu[l] + scale * normal(rng);
  }
  return e;
}

}  // namespace pnpsvgd
