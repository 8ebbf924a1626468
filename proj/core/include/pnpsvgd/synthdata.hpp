#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnpsvgd/grid.hpp"
#include "pnpsvgd/linops.hpp"

namespace pnpsvgd {

struct LayerInterface {
  /// Interface depth at trace 0 as a fraction of nt, in (0, 1).
  double depth_fraction = 0.5;
  /// Log-impedance below the interface.
  double value = 0.0;
};

/// Piecewise-constant layered log-impedance model. The interface row at trace j is
///   round(depth_fraction * nt) + round(dip_per_trace * j + roughness * sin(2 pi j / nx + phase))
/// where phase is drawn per interface from `seed`.
struct LayeredModelSpec {
  std::size_t nt = 100;
  std::size_t nx = 60;
  double top_value = 8.3;
  std::vector<LayerInterface> interfaces;
  double dip_per_trace = 0.0;
  double roughness = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Layered stand-in for the Hess model at desk scale.
LayeredModelSpec hess_like_spec(std::size_t nt = 100, std::size_t nx = 60);

Grid2D layered_model(const LayeredModelSpec& spec);

/// Heavy Gaussian smoothing of a model, used as the prior mean.
Grid2D smooth_background(const Grid2D& m, double sigma_blur);

/// Seeded white noise filtered by the wavelet along time and a normalized triangle
/// of half-width x_halfwidth across traces, rescaled to the requested RMS.
Grid2D bandpassed_noise(std::size_t nt, std::size_t nx, double amplitude, const Wavelet& wavelet,
                        std::size_t x_halfwidth, std::uint64_t seed);

struct ObservedData {
  Grid2D d_obs;
  Grid2D noise;
};

/// d_obs = G m_true + noise with G the post-stack operator of `wavelet`.
ObservedData make_observed(const Grid2D& m_true, const Wavelet& wavelet, double noise_amplitude, std::uint64_t seed,
                           std::size_t x_halfwidth = 2);

double rms(const Grid2D& g);

}  // namespace pnpsvgd
