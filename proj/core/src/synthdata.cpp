#include "pnpsvgd/synthdata.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {

void LayeredModelSpec::validate() const {
  if (nt == 0 || nx == 0) throw InvalidArgument("layered model dimensions must be positive");
  if (interfaces.empty()) throw InvalidArgument("layered model needs at least two layers");
  double prev = 0.0;
  for (const auto& f : interfaces) {
    if (!(f.depth_fraction > 0.0 && f.depth_fraction < 1.0))
      throw InvalidArgument("interface depth fractions must lie in (0, 1)");
    if (!(f.depth_fraction > prev)) throw InvalidArgument("interface depth fractions must be strictly ascending");
    prev = f.depth_fraction;
  }
  if (roughness < 0.0) throw InvalidArgument("roughness must be non-negative");
}

LayeredModelSpec hess_like_spec(std::size_t nt, std::size_t nx) {
  LayeredModelSpec s;
  s.nt = nt;
  s.nx = nx;
  s.top_value = 8.3;
  s.interfaces = {{0.18, 8.55}, {0.33, 8.40}, {0.47, 8.80}, {0.60, 8.65}, {0.72, 9.05}, {0.86, 8.90}};
  s.dip_per_trace = 0.12;
  s.roughness = 2.0;
  s.seed = 11;
  return s;
}

Grid2D layered_model(const LayeredModelSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(spec.interfaces.size());
  for (double& p : phases) p = phase_dist(rng);

  Grid2D m(spec.nt, spec.nx, spec.top_value);
  for (std::size_t k = 0; k < spec.interfaces.size(); ++k) {
    const auto& f = spec.interfaces[k];
    const long base = std::lround(f.depth_fraction * static_cast<double>(spec.nt));
    for (std::size_t j = 0; j < spec.nx; ++j) {
      double offset = spec.dip_per_trace * static_cast<double>(j);
      if (spec.roughness > 0.0)
        offset += spec.roughness *
                  std::sin(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(spec.nx) + phases[k]);
      const long row = std::max(0L, base + std::lround(offset));
      for (auto r = static_cast<std::size_t>(row); r < spec.nt; ++r) m(r, j) = f.value;
    }
  }
  return m;
}

Grid2D smooth_background(const Grid2D& m, double sigma_blur) { return gaussian_denoise(m, sigma_blur); }

Grid2D bandpassed_noise(std::size_t nt, std::size_t nx, double amplitude, const Wavelet& wavelet,
                        std::size_t x_halfwidth, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("noise amplitude must be non-negative");
  Grid2D white(nt, nx);
  if (amplitude == 0.0) return white;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : white.flat()) v = normal(rng);

  const Grid2D banded = apply(LinOp::convolve_t(wavelet), white, false);

  // Triangle weights (h + 1 - |k|), normalized, symmetric boundaries across traces.
  const auto h = static_cast<std::ptrdiff_t>(x_halfwidth);
  std::vector<double> tri(static_cast<std::size_t>(2 * h + 1));
  double total = 0.0;
  for (std::ptrdiff_t k = -h; k <= h; ++k) {
    const auto w = static_cast<double>(h + 1 - std::abs(k));
    tri[static_cast<std::size_t>(k + h)] = w;
    total += w;
  }
  for (double& w : tri) w /= total;
  const auto n = static_cast<std::ptrdiff_t>(nx);
  auto reflect = [n](std::ptrdiff_t j) {
    const std::ptrdiff_t period = 2 * n;
    std::ptrdiff_t r = j % period;
    if (r < 0) r += period;
    return static_cast<std::size_t>(r >= n ? period - 1 - r : r);
  };
  Grid2D out(nt, nx);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::ptrdiff_t ix = 0; ix < n; ++ix) {
      double s = 0.0;
      for (std::ptrdiff_t k = -h; k <= h; ++k) s += tri[static_cast<std::size_t>(k + h)] * banded(it, reflect(ix + k));
      out(it, static_cast<std::size_t>(ix)) = s;
    }
  }
  const double current = rms(out);
  if (current == 0.0) throw NumericalFailure("band-passed noise vanished before rescaling");
  const double scale = amplitude / current;
  for (double& v : out.flat()) v *= scale;
  return out;
}

ObservedData make_observed(const Grid2D& m_true, const Wavelet& wavelet, double noise_amplitude, std::uint64_t seed,
                           std::size_t x_halfwidth) {
  ObservedData out;
  out.noise = bandpassed_noise(m_true.nt(), m_true.nx(), noise_amplitude, wavelet, x_halfwidth, seed);
  out.d_obs = apply(post_stack_operator(wavelet), m_true, false);
  axpy(1.0, out.noise.flat(), out.d_obs.flat());
  return out;
}

double rms(const Grid2D& g) { return std::sqrt(norm_sq(g.flat()) / static_cast<double>(g.size())); }

}  // namespace pnpsvgd
