#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/density.hpp"
#include "pnpsvgd/ensemble.hpp"
#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

enum class Schedule { Constant, Cosine };

struct SamplerConfig {
  std::size_t n_particles = 100;
  std::size_t n_iters = 50;
  double eta_max = 1.0e-2;
  double eta_min = 1.0e-4;
  Schedule schedule = Schedule::Cosine;
  std::uint64_t seed = 0;
  /// Set for PnP-SVGD; empty runs vanilla SVGD.
  std::optional<DenoiserSpec> denoiser;
  /// Record every k-th iteration (plus the initial and final states); 0 disables the trace.
  std::size_t trace_every = 1;
  /// Use m - eta * phi instead of m + eta * phi.
  bool paper_literal_sign = false;

  void validate() const;
};

struct TraceRecord {
  /// Number of completed iterations when the record was taken.
  std::size_t iteration = 0;
  /// Step size used for the iteration that produced this state (0 for the initial state).
  double eta = 0.0;
  Grid2D mean;
  Grid2D std;
  double mean_misfit = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

/// eta_min + (eta_max - eta_min)(1 + cos(pi t / T)) / 2 for 0 <= t <= T.
double cosine_step(std::size_t t, std::size_t T, double eta_max, double eta_min);

/// Step size for iteration t in [0, n_iters).
double step_size(const SamplerConfig& cfg, std::size_t t);

/// One SVGD update with median-trick bandwidth, m_i <- m_i + eta * phi(m_i).
/// Throws NumericalFailure naming the particle whose gradient is non-finite.
Ensemble svgd_step(const Ensemble& e, const LogDensity& target, double eta, bool paper_literal_sign = false);

/// svgd_step followed by the denoiser applied to every particle as an image.
Ensemble pnp_svgd_step(const Ensemble& e, const LogDensity& target, double eta, const DenoiserSpec& den,
                       bool paper_literal_sign = false);

/// Reduced statistics of an ensemble for the trace.
TraceRecord summarize(const Ensemble& e, const LogDensity& target, std::size_t iteration, double eta);

std::pair<Ensemble, RunTrace> run_sampler(const SamplerConfig& cfg, const LogDensity& target, const Ensemble& init);

/// n draws of mean + sqrt(variance) z, z ~ N(0, I), from a seeded generator.
Ensemble init_ensemble(const Grid2D& mean, double variance, std::size_t n, std::uint64_t seed);

}  // namespace pnpsvgd
