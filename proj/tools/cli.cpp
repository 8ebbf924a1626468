#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pnpsvgd/config.hpp"
#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/kernel.hpp"
#include "pnpsvgd/matrix_io.hpp"
#include "pnpsvgd/parallel.hpp"
#include "pnpsvgd/pnp_pd.hpp"
#include "pnpsvgd/posterior.hpp"
#include "pnpsvgd/samplers.hpp"
#include "pnpsvgd/stats.hpp"
#include "pnpsvgd/synthdata.hpp"

namespace fs = std::filesystem;

namespace pnpsvgd::cli {
namespace {

constexpr const char* kThreadsEnv = "PNPSVGD_THREADS";

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

struct SyntheticCase {
  Grid2D m_true;
  Grid2D background;
  Grid2D d_obs;
  Grid2D noise;
};

SyntheticCase synthesize(const RunConfig& cfg) {
  SyntheticCase s;
  s.m_true = layered_model(cfg.model);
  const Wavelet w = cfg.wavelet();
  const Grid2D clean = apply(post_stack_operator(w), s.m_true, false);
  const double amplitude = cfg.noise_fraction * rms(clean);
  ObservedData obs = make_observed(s.m_true, w, amplitude, cfg.seed, cfg.noise_x_halfwidth);
  s.d_obs = std::move(obs.d_obs);
  s.noise = std::move(obs.noise);
  s.background = smooth_background(s.m_true, cfg.background_blur);
  return s;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg) {
  write_text_file(dir / "manifest.txt", "# pnpsvgd run manifest\n# command: " + command + "\n" + render_config(cfg));
}

void maybe_pgm(const RunConfig& cfg, const fs::path& path, const Grid2D& g) {
  if (cfg.emit_pgm) write_pgm(path, g);
}

int cmd_synth(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const SyntheticCase s = synthesize(cfg);
  write_matrix(dir / "m_true.fm", s.m_true);
  write_matrix(dir / "m_background.fm", s.background);
  write_matrix(dir / "d_obs.fm", s.d_obs);
  write_matrix(dir / "noise.fm", s.noise);
  maybe_pgm(cfg, dir / "m_true.pgm", s.m_true);
  maybe_pgm(cfg, dir / "d_obs.pgm", s.d_obs);
  write_manifest(dir, "synth", cfg);
  out << "synth: " << s.m_true.nt() << "x" << s.m_true.nx() << " model, noise rms " << format_double(rms(s.noise))
      << "\n";
  return kOk;
}

struct InversionInputs {
  Grid2D d_obs;
  Grid2D background;
  std::optional<Grid2D> m_true;
};

InversionInputs load_inputs(const RunConfig& cfg) {
  InversionInputs in;
  if (cfg.d_obs_path.empty()) {
    SyntheticCase s = synthesize(cfg);
    in.d_obs = std::move(s.d_obs);
    in.background = cfg.background_path.empty() ? std::move(s.background) : read_matrix(cfg.background_path);
    in.m_true = cfg.m_true_path.empty() ? std::move(s.m_true) : read_matrix(cfg.m_true_path);
  } else {
    in.d_obs = read_matrix(cfg.d_obs_path);
    if (cfg.background_path.empty()) throw ConfigError("background_path is required when d_obs_path is set", 0);
    in.background = read_matrix(cfg.background_path);
    if (!cfg.m_true_path.empty()) in.m_true = read_matrix(cfg.m_true_path);
  }
  require_same_shape(in.d_obs, in.background, "background vs d_obs");
  if (in.m_true) require_same_shape(*in.m_true, in.d_obs, "m_true vs d_obs");
  return in;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ",";
    s += c;
  }
  return s + "\n";
}

double median_of(std::span<const double> v) {
  std::vector<double> c(v.begin(), v.end());
  const auto mid = c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2);
  std::nth_element(c.begin(), mid, c.end());
  return *mid;
}

int cmd_invert(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const InversionInputs in = load_inputs(cfg);
  const Wavelet w = cfg.wavelet();
  const PosteriorModel model(post_stack_operator(w), in.d_obs, cfg.posterior_params());

  std::string summary = csv_row({"key", "value"});
  summary += csv_row({"method", method_name(cfg.method)});

  if (cfg.method == Method::PnpPd) {
    PDConfig pd = cfg.pd;
    pd.denoiser = cfg.denoiser();
    const PDResult res = pnp_pd_run(model, in.background, pd);
    write_matrix(dir / "m_map.fm", res.m);
    maybe_pgm(cfg, dir / "m_map.pgm", res.m);
    std::string csv = csv_row({"iteration", "misfit"});
    for (std::size_t t = 0; t < res.misfit_trace.size(); ++t)
      csv += csv_row({std::to_string(t + 1), format_double(res.misfit_trace[t])});
    write_text_file(dir / "misfit.csv", csv);
    summary += csv_row({"initial_misfit", format_double(model.data_misfit(in.background))});
    if (!res.misfit_trace.empty()) summary += csv_row({"final_misfit", format_double(res.misfit_trace.back())});
    if (in.m_true) summary += csv_row({"snr_db", format_double(snr_db(*in.m_true, res.m))});
    write_text_file(dir / "summary.csv", summary);
    write_manifest(dir, "invert", cfg);
    out << "pnp-pd: " << pd.n_iters << " iterations";
    if (in.m_true) out << ", SNR " << format_double(snr_db(*in.m_true, res.m)) << " dB";
    out << "\n";
    return kOk;
  }

  SamplerConfig sc = cfg.sampler;
  sc.seed = cfg.seed;
  if (cfg.method == Method::PnpSvgd) sc.denoiser = cfg.denoiser();
  if (cfg.normalize_step) {
    const double lipschitz = model.params().data_weight * estimate_norm_sq(model.op(), in.d_obs.shape());
    sc.eta_max /= lipschitz;
    sc.eta_min /= lipschitz;
  }
  const Ensemble init = init_ensemble(in.background, cfg.init_variance, sc.n_particles, cfg.seed);
  auto [final_ens, trace] = run_sampler(sc, model, init);

  write_ensemble(dir / "ensemble.fm", final_ens);
  const Grid2D prior_mean = ensemble_mean(init);
  const Grid2D post_mean = ensemble_mean(final_ens);
  write_matrix(dir / "prior_mean.fm", prior_mean);
  write_matrix(dir / "posterior_mean.fm", post_mean);
  maybe_pgm(cfg, dir / "posterior_mean.pgm", post_mean);
  if (final_ens.n() >= 2) {
    const Grid2D prior_std = ensemble_std(init);
    const Grid2D post_std = ensemble_std(final_ens);
    write_matrix(dir / "prior_std.fm", prior_std);
    write_matrix(dir / "posterior_std.fm", post_std);
    maybe_pgm(cfg, dir / "posterior_std.pgm", post_std);
  }

  std::string csv = csv_row({"iteration", "eta", "mean_misfit", "median_std"});
  for (const auto& r : trace.records)
    csv += csv_row({std::to_string(r.iteration), format_double(r.eta), format_double(r.mean_misfit),
                    format_double(median_of(r.std.flat()))});
  write_text_file(dir / "misfit.csv", csv);

  summary += csv_row({"n_particles", std::to_string(sc.n_particles)});
  summary += csv_row({"n_iters", std::to_string(sc.n_iters)});
  summary += csv_row({"eta_max_effective", format_double(sc.eta_max)});
  summary += csv_row({"eta_min_effective", format_double(sc.eta_min)});
  if (!trace.records.empty()) {
    summary += csv_row({"initial_mean_misfit", format_double(trace.records.front().mean_misfit)});
    summary += csv_row({"final_mean_misfit", format_double(trace.records.back().mean_misfit)});
  }
  std::optional<double> snr;
  if (in.m_true) {
    snr = snr_db(*in.m_true, post_mean);
    summary += csv_row({"snr_db", format_double(*snr)});
  }
  write_text_file(dir / "summary.csv", summary);
  write_manifest(dir, "invert", cfg);
  out << method_name(cfg.method) << ": " << sc.n_particles << " particles, " << sc.n_iters << " iterations";
  if (snr) out << ", posterior-mean SNR " << format_double(*snr) << " dB";
  out << "\n";
  return kOk;
}

int cmd_stats(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  if (cfg.ensemble_path.empty()) throw ConfigError("stats requires ensemble_path", 0);
  const Ensemble e = read_ensemble(cfg.ensemble_path);
  const Shape s = e.shape();
  const Grid2D mean = ensemble_mean(e);
  write_matrix(dir / "mean.fm", mean);
  maybe_pgm(cfg, dir / "mean.pgm", mean);
  if (e.n() >= 2) {
    const Grid2D sd = ensemble_std(e);
    write_matrix(dir / "std.fm", sd);
    maybe_pgm(cfg, dir / "std.pgm", sd);
  }

  auto locations = cfg.hist_locations;
  if (locations.empty()) locations = {{s.nt / 4, s.nx / 2}, {s.nt / 2, s.nx / 2}, {3 * s.nt / 4, s.nx / 2}};
  std::string hist = csv_row({"it", "ix", "bin", "lo", "hi", "count"});
  for (const auto& [it, ix] : locations) {
    const PointwiseHistogram h = pointwise_histogram(e, it, ix, cfg.hist_bins);
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      hist += csv_row({std::to_string(it), std::to_string(ix), std::to_string(b), format_double(h.edges[b]),
                       format_double(h.edges[b + 1]), std::to_string(h.counts[b])});
  }
  write_text_file(dir / "histograms.csv", hist);

  auto traces = cfg.trace_indices;
  if (traces.empty()) traces = {s.nx / 2};
  std::string ti_csv = csv_row({"ix", "it", "mean", "lo", "hi"});
  for (std::size_t ix : traces) {
    const TraceInterval ti = trace_interval(e, ix);
    for (std::size_t it = 0; it < s.nt; ++it)
      ti_csv += csv_row({std::to_string(ix), std::to_string(it), format_double(ti.mean[it]), format_double(ti.lo[it]),
                         format_double(ti.hi[it])});
  }
  write_text_file(dir / "trace_intervals.csv", ti_csv);

  if (!cfg.m_true_path.empty()) {
    const Grid2D ref = read_matrix(cfg.m_true_path);
    std::string summary = csv_row({"key", "value"});
    summary += csv_row({"snr_db", format_double(snr_db(ref, mean))});
    for (std::size_t ix : traces)
      summary += csv_row({"snr_db_trace_" + std::to_string(ix), format_double(snr_db_trace(ref, mean, ix))});
    write_text_file(dir / "summary.csv", summary);
  }
  write_manifest(dir, "stats", cfg);
  out << "stats: " << e.n() << " particles of " << s.nt << "x" << s.nx << "\n";
  return kOk;
}

int cmd_dottest(const RunConfig& cfg, const fs::path& dir, std::ostream& out, std::ostream& err) {
  const Wavelet w = cfg.wavelet();
  const std::vector<std::pair<std::string, LinOp>> ops = {
      {"G", post_stack_operator(w)},
      {"DerivativeT", LinOp::derivative_t()},
      {"DerivativeX", LinOp::derivative_x()},
      {"ConvolveT", LinOp::convolve_t(w)},
      {"StackTV", LinOp::stack_tv()},
  };
  std::string csv = csv_row({"operator", "max_rel_error"});
  double worst = 0.0;
  for (const auto& [name, op] : ops) {
    const double e = dot_test(op, cfg.model.nt, cfg.model.nx, cfg.dottest_trials, cfg.seed);
    worst = std::max(worst, e);
    out << name << " " << format_double(e) << "\n";
    csv += csv_row({name, format_double(e)});
  }
  write_text_file(dir / "dottest.csv", csv);
  write_manifest(dir, "dottest", cfg);
  out << "max_rel_error " << format_double(worst) << "\n";
  if (!(worst <= kDotTestTolerance)) {
    err << "dottest: adjoint mismatch above " << format_double(kDotTestTolerance) << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

void configure_threads() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kThreadsEnv); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer", 0);
    threads = static_cast<std::size_t>(v);
  }
  set_max_threads(threads);
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  configure_threads();
  RunConfig cfg;
  if (!inv.config_path.empty()) cfg = parse_config(read_text_file(inv.config_path));
  if (inv.seed) cfg.seed = *inv.seed;

  const fs::path dir(inv.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  if (inv.command == "synth") return cmd_synth(cfg, dir, out);
  if (inv.command == "invert") return cmd_invert(cfg, dir, out);
  if (inv.command == "stats") return cmd_stats(cfg, dir, out);
  return cmd_dottest(cfg, dir, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plug-and-play Stein variational inversion of post-stack seismic data"};
  app.require_subcommand(1);
  app.footer("Config keys (key=value lines, '#' comments):\n" + config_help() +
             "\nEnvironment: PNPSVGD_THREADS caps worker threads.\n"
             "Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 I/O error.");

  Invocation inv;
  for (const char* name : {"synth", "invert", "stats", "dottest"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "key=value configuration file");
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", inv.seed, "override the configured seed");
    sub->callback([&inv, sub] { inv.command = sub->get_name(); });
  }
  app.get_subcommand("synth")->description("write m_true, m_background, d_obs and noise matrix files");
  app.get_subcommand("invert")->description("run svgd, pnp-svgd or pnp-pd (config key 'method')");
  app.get_subcommand("stats")->description("histograms and credible intervals of a stored ensemble");
  app.get_subcommand("dottest")->description("adjoint test of every operator; fails above 1e-10");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return dispatch(inv, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kIoError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pnpsvgd::cli
