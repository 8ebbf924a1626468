#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/linops.hpp"
#include "pnpsvgd/pnp_pd.hpp"
#include "pnpsvgd/posterior.hpp"
#include "pnpsvgd/samplers.hpp"
#include "pnpsvgd/synthdata.hpp"

namespace pnpsvgd {

enum class Method { Svgd, PnpSvgd, PnpPd };

/// Fully resolved run configuration. Parsed from flat "key=value" text with '#'
/// comments; render_config produces text that parses back to the same values.
struct RunConfig {
  Method method = Method::Svgd;
  std::uint64_t seed = 0;

  LayeredModelSpec model = hess_like_spec();
  double peak_freq = 8.0;
  double dt = 0.004;
  std::size_t wavelet_half_len = 50;
  double noise_fraction = 0.1;
  std::size_t noise_x_halfwidth = 2;
  double background_blur = 6.0;

  double noise_std = 1.0e-2;
  std::optional<double> data_weight;
  double tikh_weight = 0.1;
  double tv_weight = 0.1;
  double tv_smooth_eps = 1.0e-8;

  SamplerConfig sampler;
  double init_variance = 0.5;
  bool normalize_step = true;

  std::string denoiser_kind = "identity";
  double denoiser_sigma_blur = 1.0;
  std::size_t denoiser_window = 3;
  double denoiser_lambda = 0.02;
  int denoiser_inner_iters = 50;
  bool denoiser_isotropic = true;
  std::optional<double> denoiser_strength;

  PDConfig pd;

  std::string d_obs_path;
  std::string background_path;
  std::string m_true_path;
  std::string ensemble_path;

  std::size_t hist_bins = 20;
  std::vector<std::pair<std::size_t, std::size_t>> hist_locations;
  std::vector<std::size_t> trace_indices;

  int dottest_trials = 100;
  bool emit_pgm = false;

  RunConfig();

  PosteriorParams posterior_params() const;
  Wavelet wavelet() const;
  DenoiserSpec denoiser() const;
};

std::string method_name(Method m);

/// Throws ConfigError (with the 1-based line number) on unknown keys, malformed
/// values and constraint violations.
RunConfig parse_config(std::string_view text);

/// key=value text of every setting, in a fixed order.
std::string render_config(const RunConfig& cfg);

/// One line per key: name, default, description.
std::string config_help();

}  // namespace pnpsvgd
