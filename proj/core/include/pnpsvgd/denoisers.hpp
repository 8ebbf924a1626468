#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

/// Denoiser H_sigma plugged into the PnP samplers and the primal-dual baseline.
///
/// When `strength` is set it overrides the kind's own parameter:
///   gaussian: sigma_blur = strength
///   tv_prox:  lambda = strength^2 / 2
///   median:   ignored
/// A zero strength makes gaussian and tv_prox the identity.
struct DenoiserSpec {
  struct Identity {};
  struct Gaussian {
    double sigma_blur = 1.0;
  };
  struct Median {
    std::size_t window = 3;
  };
  struct TvProx {
    double lambda = 0.1;
    int inner_iters = 50;
    bool isotropic = true;
  };
  using Kind = std::variant<Identity, Gaussian, Median, TvProx>;

  Kind kind = Identity{};
  std::optional<double> strength;

  static DenoiserSpec identity() { return {}; }
  static DenoiserSpec gaussian(double sigma_blur) { return {Gaussian{sigma_blur}, std::nullopt}; }
  static DenoiserSpec median(std::size_t window) { return {Median{window}, std::nullopt}; }
  static DenoiserSpec tv_prox(double lambda, int inner_iters = 50, bool isotropic = true) {
    return {TvProx{lambda, inner_iters, isotropic}, std::nullopt};
  }

  DenoiserSpec with_strength(double s) const {
    DenoiserSpec copy = *this;
    copy.strength = s;
    return copy;
  }

  /// Kind with the strength mapping applied.
  Kind effective() const;
  bool is_identity() const;
  void validate() const;
  std::string describe() const;
};

Grid2D denoise(const DenoiserSpec& spec, const Grid2D& img);

/// Normalized Gaussian taps on [-ceil(4 sigma), ceil(4 sigma)].
std::vector<double> gaussian_kernel_1d(double sigma_blur);

/// Separable Gaussian smoothing with half-sample symmetric (zero-gradient) boundaries.
Grid2D gaussian_denoise(const Grid2D& img, double sigma_blur);

/// Square-window median with symmetric boundaries.
Grid2D median_denoise(const Grid2D& img, std::size_t window);

/// argmin_y 1/2 ||y - img||^2 + lambda TV(y), by projected gradient on the dual
/// (step 1/8). TV uses the same forward differences as DerivativeT/DerivativeX;
/// isotropic couples the two directions per pixel, anisotropic sums |.|.
Grid2D tv_prox(const Grid2D& img, double lambda, int inner_iters, bool isotropic = true);

/// TV(y) under the convention used by tv_prox.
double total_variation(const Grid2D& y, bool isotropic = true);

}  // namespace pnpsvgd
