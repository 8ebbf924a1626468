#pragma once

#include <cstddef>
#include <vector>

#include "pnpsvgd/ensemble.hpp"
#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

struct PointwiseHistogram {
  std::size_t it = 0;
  std::size_t ix = 0;
  /// bins + 1 strictly ascending edges.
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t n_samples = 0;
};

struct TraceInterval {
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Reported in place of +inf when estimate == reference.
inline constexpr double kSnrCapDb = 300.0;

Grid2D ensemble_mean(const Ensemble& e);
/// Sample standard deviation with 1/(n-1) normalization; needs n >= 2.
Grid2D ensemble_std(const Ensemble& e);

/// Equal-width bins over [min, max] of the samples at (it, ix); the maximum falls
/// in the last bin. Degenerate ranges are widened to [v - 0.5, v + 0.5].
PointwiseHistogram pointwise_histogram(const Ensemble& e, std::size_t it, std::size_t ix, std::size_t bins);

/// 10 log10(||ref||^2 / ||ref - est||^2), capped at kSnrCapDb.
double snr_db(const Grid2D& reference, const Grid2D& estimate);
/// SNR restricted to trace ix.
double snr_db_trace(const Grid2D& reference, const Grid2D& estimate, std::size_t ix);

/// mean +/- one standard deviation along trace ix.
TraceInterval trace_interval(const Ensemble& e, std::size_t ix);

}  // namespace pnpsvgd
