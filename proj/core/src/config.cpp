#include "pnpsvgd/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/matrix_io.hpp"

namespace pnpsvgd {
namespace {

// Raised by value parsers; parse_config attaches the line number.
struct ValueError {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end)
    throw ValueError{"expected " + std::string(what) + ", got '" + std::string(s) + "'"};
  return v;
}

double parse_double(std::string_view s) { return parse_number<double>(s, "a real number"); }
std::size_t parse_size(std::string_view s) { return parse_number<std::size_t>(s, "a non-negative integer"); }
std::uint64_t parse_u64(std::string_view s) { return parse_number<std::uint64_t>(s, "a non-negative integer"); }
int parse_int(std::string_view s) { return parse_number<int>(s, "an integer"); }

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValueError{"expected true or false, got '" + std::string(s) + "'"};
}

std::optional<double> parse_optional_double(std::string_view s) {
  if (s.empty() || s == "auto" || s == "none") return std::nullopt;
  return parse_double(s);
}

std::string render_optional(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }
std::string render_bool(bool b) { return b ? "true" : "false"; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  if (trim(s).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<LayerInterface> parse_layers(std::string_view s) {
  std::vector<LayerInterface> out;
  for (auto item : split(s, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ValueError{"layers expects depth_fraction:value pairs"};
    out.push_back({parse_double(trim(item.substr(0, colon))), parse_double(trim(item.substr(colon + 1)))});
  }
  return out;
}

std::string render_layers(const std::vector<LayerInterface>& layers) {
  std::string s;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) s += ",";
    s += format_double(layers[i].depth_fraction) + ":" + format_double(layers[i].value);
  }
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_locations(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto item : split(s, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ValueError{"hist_locations expects it:ix pairs separated by ';'"};
    out.emplace_back(parse_size(trim(item.substr(0, colon))), parse_size(trim(item.substr(colon + 1))));
  }
  return out;
}

std::string render_locations(const std::vector<std::pair<std::size_t, std::size_t>>& locs) {
  std::string s;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    if (i) s += ";";
    s += std::to_string(locs[i].first) + ":" + std::to_string(locs[i].second);
  }
  return s;
}

std::vector<std::size_t> parse_indices(std::string_view s) {
  std::vector<std::size_t> out;
  for (auto item : split(s, ',')) out.push_back(parse_size(item));
  return out;
}

std::string render_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

Method parse_method(std::string_view s) {
  if (s == "svgd") return Method::Svgd;
  if (s == "pnp-svgd") return Method::PnpSvgd;
  if (s == "pnp-pd") return Method::PnpPd;
  throw ValueError{"method must be svgd, pnp-svgd or pnp-pd"};
}

Schedule parse_schedule(std::string_view s) {
  if (s == "cosine") return Schedule::Cosine;
  if (s == "constant") return Schedule::Constant;
  throw ValueError{"schedule must be cosine or constant"};
}

std::string parse_denoiser_kind(std::string_view s) {
  if (s == "identity" || s == "gaussian" || s == "median" || s == "tv_prox") return std::string(s);
  throw ValueError{"denoiser must be identity, gaussian, median or tv_prox"};
}

struct KeyDef {
  const char* name;
  const char* help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PNPSVGD_KEY(NAME, HELP, SETTER, GETTER)                                                    \
  KeyDef {                                                                                         \
    NAME, HELP, [](RunConfig& c, std::string_view v) { SETTER; }, [](const RunConfig& c) { return GETTER; } \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> keys = {
      PNPSVGD_KEY("method", "inversion method: svgd | pnp-svgd | pnp-pd", c.method = parse_method(v),
                  method_name(c.method)),
      PNPSVGD_KEY("seed", "seed for noise and initial particles", c.seed = parse_u64(v), std::to_string(c.seed)),
      // synthetic model and data
      PNPSVGD_KEY("nt", "time samples of the synthetic model", c.model.nt = parse_size(v), std::to_string(c.model.nt)),
      PNPSVGD_KEY("nx", "traces of the synthetic model", c.model.nx = parse_size(v), std::to_string(c.model.nx)),
      PNPSVGD_KEY("top_value", "log-impedance of the top layer", c.model.top_value = parse_double(v),
                  format_double(c.model.top_value)),
      PNPSVGD_KEY("layers", "interfaces as depth_fraction:log_ai pairs, comma separated",
                  c.model.interfaces = parse_layers(v), render_layers(c.model.interfaces)),
      PNPSVGD_KEY("dip_per_trace", "interface shift in samples per trace", c.model.dip_per_trace = parse_double(v),
                  format_double(c.model.dip_per_trace)),
      PNPSVGD_KEY("roughness", "amplitude (samples) of the sinusoidal interface undulation",
                  c.model.roughness = parse_double(v), format_double(c.model.roughness)),
      PNPSVGD_KEY("model_seed", "seed for interface undulation phases", c.model.seed = parse_u64(v),
                  std::to_string(c.model.seed)),
      PNPSVGD_KEY("peak_freq", "Ricker peak frequency [Hz]", c.peak_freq = parse_double(v), format_double(c.peak_freq)),
      PNPSVGD_KEY("dt", "time sampling [s]", c.dt = parse_double(v), format_double(c.dt)),
      PNPSVGD_KEY("wavelet_half_len", "wavelet half length in samples", c.wavelet_half_len = parse_size(v),
                  std::to_string(c.wavelet_half_len)),
      PNPSVGD_KEY("noise_fraction", "band-passed noise RMS relative to clean data RMS",
                  c.noise_fraction = parse_double(v), format_double(c.noise_fraction)),
      PNPSVGD_KEY("noise_x_halfwidth", "half-width of the lateral triangle filter for noise",
                  c.noise_x_halfwidth = parse_size(v), std::to_string(c.noise_x_halfwidth)),
      PNPSVGD_KEY("background_blur", "Gaussian blur (samples) producing the background model",
                  c.background_blur = parse_double(v), format_double(c.background_blur)),
      // posterior
      PNPSVGD_KEY("noise_std", "data noise level sigma_d; data_weight = 1/sigma_d^2", c.noise_std = parse_double(v),
                  format_double(c.noise_std)),
      PNPSVGD_KEY("data_weight", "likelihood precision; auto derives it from noise_std",
                  c.data_weight = parse_optional_double(v), render_optional(c.data_weight)),
      PNPSVGD_KEY("tikh_weight", "Tikhonov (derivative) prior weight", c.tikh_weight = parse_double(v),
                  format_double(c.tikh_weight)),
      PNPSVGD_KEY("tv_weight", "anisotropic TV prior weight", c.tv_weight = parse_double(v),
                  format_double(c.tv_weight)),
      PNPSVGD_KEY("tv_smooth_eps", "TV smoothing epsilon", c.tv_smooth_eps = parse_double(v),
                  format_double(c.tv_smooth_eps)),
      // samplers
      PNPSVGD_KEY("n_particles", "number of particles", c.sampler.n_particles = parse_size(v),
                  std::to_string(c.sampler.n_particles)),
      PNPSVGD_KEY("n_iters", "sampler iterations", c.sampler.n_iters = parse_size(v),
                  std::to_string(c.sampler.n_iters)),
      PNPSVGD_KEY("eta_max", "initial step size", c.sampler.eta_max = parse_double(v),
                  format_double(c.sampler.eta_max)),
      PNPSVGD_KEY("eta_min", "final step size of the cosine schedule", c.sampler.eta_min = parse_double(v),
                  format_double(c.sampler.eta_min)),
      PNPSVGD_KEY("schedule", "step schedule: cosine | constant", c.sampler.schedule = parse_schedule(v),
                  std::string(c.sampler.schedule == Schedule::Cosine ? "cosine" : "constant")),
      PNPSVGD_KEY("trace_every", "record ensemble statistics every k iterations (0 = off)",
                  c.sampler.trace_every = parse_size(v), std::to_string(c.sampler.trace_every)),
      PNPSVGD_KEY("paper_literal_sign", "update with m - eta*phi instead of m + eta*phi",
                  c.sampler.paper_literal_sign = parse_bool(v), render_bool(c.sampler.paper_literal_sign)),
      PNPSVGD_KEY("init_variance", "variance of the initial particle cloud around the background",
                  c.init_variance = parse_double(v), format_double(c.init_variance)),
      PNPSVGD_KEY("normalize_step", "divide eta by data_weight * ||G||^2 (power iteration)",
                  c.normalize_step = parse_bool(v), render_bool(c.normalize_step)),
      // denoiser
      PNPSVGD_KEY("denoiser", "denoiser: identity | gaussian | median | tv_prox",
                  c.denoiser_kind = parse_denoiser_kind(v), c.denoiser_kind),
      PNPSVGD_KEY("denoiser_sigma_blur", "gaussian denoiser width (samples)", c.denoiser_sigma_blur = parse_double(v),
                  format_double(c.denoiser_sigma_blur)),
      PNPSVGD_KEY("denoiser_window", "median denoiser window (odd)", c.denoiser_window = parse_size(v),
                  std::to_string(c.denoiser_window)),
      PNPSVGD_KEY("denoiser_lambda", "tv_prox regularization weight", c.denoiser_lambda = parse_double(v),
                  format_double(c.denoiser_lambda)),
      PNPSVGD_KEY("denoiser_inner_iters", "tv_prox dual iterations", c.denoiser_inner_iters = parse_int(v),
                  std::to_string(c.denoiser_inner_iters)),
      PNPSVGD_KEY("denoiser_isotropic", "tv_prox uses isotropic TV", c.denoiser_isotropic = parse_bool(v),
                  render_bool(c.denoiser_isotropic)),
      PNPSVGD_KEY("denoiser_strength", "noise level sigma overriding the kind's parameter (auto = unset)",
                  c.denoiser_strength = parse_optional_double(v), render_optional(c.denoiser_strength)),
      // primal-dual
      PNPSVGD_KEY("pd_tau", "primal step", c.pd.tau = parse_double(v), format_double(c.pd.tau)),
      PNPSVGD_KEY("pd_sigma", "dual step; the denoiser runs at strength 1/pd_sigma", c.pd.sigma_pd = parse_double(v),
                  format_double(c.pd.sigma_pd)),
      PNPSVGD_KEY("pd_theta", "over-relaxation in [0, 1]", c.pd.theta = parse_double(v), format_double(c.pd.theta)),
      PNPSVGD_KEY("pd_iters", "primal-dual iterations", c.pd.n_iters = parse_size(v), std::to_string(c.pd.n_iters)),
      PNPSVGD_KEY("cg_tol", "relative tolerance of the inner CG solve", c.pd.cg_tol = parse_double(v),
                  format_double(c.pd.cg_tol)),
      PNPSVGD_KEY("cg_maxiter", "inner CG iteration cap", c.pd.cg_maxiter = parse_size(v),
                  std::to_string(c.pd.cg_maxiter)),
      PNPSVGD_KEY("pd_bind_strength", "run the denoiser at strength 1/pd_sigma (or pd_denoiser_strength)",
                  c.pd.bind_denoiser_strength = parse_bool(v), render_bool(c.pd.bind_denoiser_strength)),
      PNPSVGD_KEY("pd_denoiser_strength", "explicit denoiser strength for pnp-pd (auto = 1/pd_sigma)",
                  c.pd.denoiser_strength = parse_optional_double(v), render_optional(c.pd.denoiser_strength)),
      PNPSVGD_KEY("pd_literal_dual", "omit the sigma factor on the denoiser output in the dual update",
                  c.pd.literal_dual_update = parse_bool(v), render_bool(c.pd.literal_dual_update)),
      // inputs
      PNPSVGD_KEY("d_obs_path", "observed data matrix file (empty = synthesize)", c.d_obs_path = std::string(v),
                  c.d_obs_path),
      PNPSVGD_KEY("background_path", "prior mean matrix file (empty = synthesize)", c.background_path = std::string(v),
                  c.background_path),
      PNPSVGD_KEY("m_true_path", "reference model for SNR (empty = synthetic truth if synthesized)",
                  c.m_true_path = std::string(v), c.m_true_path),
      PNPSVGD_KEY("ensemble_path", "ensemble matrix file consumed by stats", c.ensemble_path = std::string(v),
                  c.ensemble_path),
      // statistics
      PNPSVGD_KEY("hist_bins", "bins of pointwise histograms", c.hist_bins = parse_size(v),
                  std::to_string(c.hist_bins)),
      PNPSVGD_KEY("hist_locations", "histogram pixels as it:ix;it:ix (empty = three along the center trace)",
                  c.hist_locations = parse_locations(v), render_locations(c.hist_locations)),
      PNPSVGD_KEY("trace_indices", "traces for credible intervals, comma separated (empty = center trace)",
                  c.trace_indices = parse_indices(v), render_indices(c.trace_indices)),
      PNPSVGD_KEY("dottest_trials", "random trials per operator in dottest", c.dottest_trials = parse_int(v),
                  std::to_string(c.dottest_trials)),
      PNPSVGD_KEY("emit_pgm", "also write 8-bit PGM heatmaps", c.emit_pgm = parse_bool(v), render_bool(c.emit_pgm)),
  };
  return keys;
}

#undef PNPSVGD_KEY

void validate(const RunConfig& c, const std::map<std::string, std::size_t>& lines) {
  auto line_of = [&](std::initializer_list<const char*> keys) {
    std::size_t best = 0;
    for (const char* k : keys) {
      auto it = lines.find(k);
      if (it != lines.end()) best = std::max(best, it->second);
    }
    return best;
  };
  auto require = [&](bool ok, std::initializer_list<const char*> keys, const std::string& msg) {
    if (!ok) throw ConfigError(msg, line_of(keys));
  };
  auto guarded = [&](std::initializer_list<const char*> keys, const auto& fn) {
    try {
      fn();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what(), line_of(keys));
    }
  };

  require(c.model.nt > 0 && c.model.nx > 0, {"nt", "nx"}, "nt and nx must be positive");
  guarded({"layers", "roughness"}, [&] { c.model.validate(); });
  guarded({"peak_freq", "dt", "wavelet_half_len"}, [&] { (void)c.wavelet(); });
  require(c.noise_fraction >= 0.0, {"noise_fraction"}, "noise_fraction must be non-negative");
  require(c.background_blur > 0.0, {"background_blur"}, "background_blur must be positive");
  require(c.noise_std > 0.0, {"noise_std"}, "noise_std must be positive");
  require(!c.data_weight || *c.data_weight > 0.0, {"data_weight"}, "data_weight must be positive");
  require(c.tikh_weight >= 0.0 && c.tv_weight >= 0.0, {"tikh_weight", "tv_weight"},
          "prior weights must be non-negative");
  require(c.tv_smooth_eps > 0.0, {"tv_smooth_eps"}, "tv_smooth_eps must be positive");
  guarded({"n_particles", "n_iters", "eta_max", "eta_min"}, [&] { c.sampler.validate(); });
  require(c.init_variance >= 0.0, {"init_variance"}, "init_variance must be non-negative");
  guarded({"denoiser", "denoiser_sigma_blur", "denoiser_window", "denoiser_lambda", "denoiser_inner_iters",
           "denoiser_strength"},
          [&] { c.denoiser().validate(); });
  require(c.pd.tau * c.pd.sigma_pd < 1.0, {"pd_tau", "pd_sigma"}, "pd_tau * pd_sigma must be below 1");
  PDConfig pd = c.pd;
  pd.denoiser = c.denoiser();
  guarded({"pd_tau", "pd_sigma", "pd_theta", "cg_tol", "cg_maxiter", "pd_denoiser_strength"}, [&] { pd.validate(); });
  require(c.hist_bins >= 1, {"hist_bins"}, "hist_bins must be at least 1");
  require(c.dottest_trials >= 1, {"dottest_trials"}, "dottest_trials must be at least 1");
}

}  // namespace

RunConfig::RunConfig() {
  // Step sizes are in units of 1 / (data_weight ||G||^2) because normalize_step defaults to true.
  sampler.eta_max = 4.0;
  pd.tau = 0.075;
  pd.sigma_pd = 12.0;
  sampler.eta_min = 1.0e-2;
}

PosteriorParams RunConfig::posterior_params() const {
  PosteriorParams p;
  p.data_weight = data_weight.value_or(PosteriorParams::weight_from_noise_std(noise_std));
  p.tikh_weight = tikh_weight;
  p.tv_weight = tv_weight;
  p.tv_smooth_eps = tv_smooth_eps;
  return p;
}

Wavelet RunConfig::wavelet() const { return ricker_wavelet(peak_freq, dt, wavelet_half_len); }

DenoiserSpec RunConfig::denoiser() const {
  DenoiserSpec spec;
  if (denoiser_kind == "gaussian") spec = DenoiserSpec::gaussian(denoiser_sigma_blur);
  if (denoiser_kind == "median") spec = DenoiserSpec::median(denoiser_window);
  if (denoiser_kind == "tv_prox") spec = DenoiserSpec::tv_prox(denoiser_lambda, denoiser_inner_iters, denoiser_isotropic);
  spec.strength = denoiser_strength;
  return spec;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Svgd:
      return "svgd";
    case Method::PnpSvgd:
      return "pnp-svgd";
    case Method::PnpPd:
      return "pnp-pd";
  }
  return "svgd";
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, std::size_t> lines;
  std::map<std::string_view, const KeyDef*> by_name;
  for (const auto& k : key_table()) by_name.emplace(k.name, &k);

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    try {
      it->second->set(cfg, value);
    } catch (const ValueError& e) {
      throw ConfigError(std::string(key) + ": " + e.message, line_no);
    }
    lines[std::string(key)] = line_no;
  }
  validate(cfg, lines);
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& k : key_table()) out << k.name << "=" << k.get(cfg) << "\n";
  return out.str();
}

std::string config_help() {
  const RunConfig defaults;
  std::ostringstream out;
  for (const auto& k : key_table()) {
    out << "  " << k.name << " (default: " << k.get(defaults) << ")\n      " << k.help << "\n";
  }
  return out.str();
}

}  // namespace pnpsvgd
