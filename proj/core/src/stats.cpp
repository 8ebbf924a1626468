#include "pnpsvgd/stats.hpp"

#include <algorithm>
#include <cmath>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {
namespace {

double snr_from_sums(double signal, double error) {
  if (signal == 0.0) throw InvalidArgument("snr_db: reference is identically zero");
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

}  // namespace

Grid2D ensemble_mean(const Ensemble& e) {
  Grid2D mean(e.shape());
  auto out = mean.flat();
  for (std::size_t i = 0; i < e.n(); ++i) axpy(1.0, e.particle(i), out);
  const double inv = 1.0 / static_cast<double>(e.n());
  for (double& v : out) v *= inv;
  return mean;
}

Grid2D ensemble_std(const Ensemble& e) {
  if (e.n() < 2) throw InvalidArgument("ensemble_std needs at least two particles");
  const Grid2D mean = ensemble_mean(e);
  const auto mu = mean.flat();
  Grid2D var(e.shape());
  auto acc = var.flat();
  for (std::size_t i = 0; i < e.n(); ++i) {
    const auto p = e.particle(i);
    for (std::size_t l = 0; l < p.size(); ++l) {
      const double r = p[l] - mu[l];
      acc[l] += r * r;
    }
  }
  const double inv = 1.0 / static_cast<double>(e.n() - 1);
  for (double& v : acc) v = std::sqrt(v * inv);
  return var;
}

PointwiseHistogram pointwise_histogram(const Ensemble& e, std::size_t it, std::size_t ix, std::size_t bins) {
  if (bins < 1) throw InvalidArgument("pointwise_histogram: bins must be at least 1");
  const Shape s = e.shape();
  if (it >= s.nt || ix >= s.nx) throw InvalidArgument("pointwise_histogram: location out of range");
  const std::size_t l = it * s.nx + ix;
  std::vector<double> v(e.n());
  for (std::size_t i = 0; i < e.n(); ++i) v[i] = e.particle(i)[l];
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  PointwiseHistogram h;
  h.it = it;
  h.ix = ix;
  h.n_samples = e.n();
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  h.edges[bins] = hi;
  for (double x : v) {
    auto b = static_cast<std::size_t>(std::floor((x - lo) / (hi - lo) * static_cast<double>(bins)));
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

double snr_db(const Grid2D& reference, const Grid2D& estimate) {
  require_same_shape(reference, estimate, "snr_db");
  double signal = 0.0, error = 0.0;
  const auto r = reference.flat();
  const auto x = estimate.flat();
  for (std::size_t i = 0; i < r.size(); ++i) {
    signal += r[i] * r[i];
    error += (r[i] - x[i]) * (r[i] - x[i]);
  }
  return snr_from_sums(signal, error);
}

double snr_db_trace(const Grid2D& reference, const Grid2D& estimate, std::size_t ix) {
  require_same_shape(reference, estimate, "snr_db_trace");
  if (ix >= reference.nx()) throw InvalidArgument("snr_db_trace: trace out of range");
  double signal = 0.0, error = 0.0;
  for (std::size_t it = 0; it < reference.nt(); ++it) {
    const double r = reference(it, ix);
    const double d = r - estimate(it, ix);
    signal += r * r;
    error += d * d;
  }
  return snr_from_sums(signal, error);
}

TraceInterval trace_interval(const Ensemble& e, std::size_t ix) {
  if (ix >= e.shape().nx) throw InvalidArgument("trace_interval: trace out of range");
  const Grid2D mean = ensemble_mean(e);
  const Grid2D sd = e.n() >= 2 ? ensemble_std(e) : Grid2D(e.shape());
  TraceInterval ti;
  const std::size_t nt = e.shape().nt;
  ti.mean.resize(nt);
  ti.lo.resize(nt);
  ti.hi.resize(nt);
  for (std::size_t it = 0; it < nt; ++it) {
    ti.mean[it] = mean(it, ix);
    ti.lo[it] = mean(it, ix) - sd(it, ix);
    ti.hi[it] = mean(it, ix) + sd(it, ix);
  }
  return ti;
}

}  // namespace pnpsvgd
