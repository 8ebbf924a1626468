#include "pnpsvgd/pnp_pd.hpp"

#include <cmath>
#include <string>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {

void PDConfig::validate() const {
  if (!(tau > 0.0) || !(sigma_pd > 0.0)) throw InvalidArgument("tau and sigma_pd must be positive");
  if (!(tau * sigma_pd < 1.0)) throw InvalidArgument("tau * sigma_pd must be below 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  if (!(cg_tol > 0.0)) throw InvalidArgument("cg_tol must be positive");
  if (cg_maxiter < 1) throw InvalidArgument("cg_maxiter must be at least 1");
  effective_denoiser().validate();
}

DenoiserSpec PDConfig::effective_denoiser() const {
  if (!bind_denoiser_strength) return denoiser;
  return denoiser.with_strength(denoiser_strength.value_or(1.0 / sigma_pd));
}

CGResult cg_solve(const GridOperator& apply_A, const Grid2D& b, double tol, std::size_t maxiter, const Grid2D* x0) {
  CGResult res;
  const double b_norm = std::sqrt(norm_sq(b.flat()));
  res.x = x0 ? *x0 : Grid2D(b.shape());
  if (x0) require_same_shape(*x0, b, "cg_solve");
  if (b_norm == 0.0) {
    res.x = Grid2D(b.shape());
    res.converged = true;
    return res;
  }
  Grid2D r = b;
  if (x0) axpy(-1.0, apply_A(res.x).flat(), r.flat());
  double rr = norm_sq(r.flat());
  res.rel_residual = std::sqrt(rr) / b_norm;
  if (res.rel_residual <= tol) {
    res.converged = true;
    return res;
  }
  Grid2D p = r;
  for (std::size_t k = 0; k < maxiter; ++k) {
    const Grid2D ap = apply_A(p);
    require_same_shape(ap, b, "cg_solve");
    const double curvature = dot(p.flat(), ap.flat());
    if (!(curvature > 0.0) || !std::isfinite(curvature))
      throw NumericalFailure("cg_solve: non-positive curvature at iteration " + std::to_string(k));
    const double alpha = rr / curvature;
    axpy(alpha, p.flat(), res.x.flat());
    axpy(-alpha, ap.flat(), r.flat());
    const double rr_next = norm_sq(r.flat());
    res.iterations = k + 1;
    res.rel_residual = std::sqrt(rr_next) / b_norm;
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    auto pf = p.flat();
    const auto rf = r.flat();
    for (std::size_t i = 0; i < pf.size(); ++i) pf[i] = rf[i] + beta * pf[i];
  }
  return res;
}

CGResult prox_quadratic(const LinOp& op, const Grid2D& d, double weight, const Grid2D& v, double tau, double cg_tol,
                        std::size_t cg_maxiter) {
  if (!(tau > 0.0)) throw InvalidArgument("prox: tau must be positive");
  require_same_shape(v, d, "prox_data");
  if (weight == 0.0) {
    CGResult trivial;
    trivial.x = v;
    trivial.converged = true;
    return trivial;
  }
  const double tw = tau * weight;
  Grid2D rhs = v;
  axpy(tw, apply(op, d, true).flat(), rhs.flat());
  auto normal_op = [&](const Grid2D& y) {
    Grid2D out = y;
    axpy(tw, apply(op, apply(op, y, false), true).flat(), out.flat());
    return out;
  };
  return cg_solve(normal_op, rhs, cg_tol, cg_maxiter, &v);
}

Grid2D prox_data(const PosteriorModel& model, const Grid2D& v, double tau, const PDConfig& cfg) {
  return prox_quadratic(model.op(), model.d_obs(), model.params().data_weight, v, tau, cfg.cg_tol, cfg.cg_maxiter).x;
}

PDResult pnp_pd_run(const PosteriorModel& model, const Grid2D& m0, const PDConfig& cfg) {
  cfg.validate();
  require_same_shape(m0, model.d_obs(), "pnp_pd_run");
  const DenoiserSpec den = cfg.effective_denoiser();
  const double sigma = cfg.sigma_pd;

  PDResult out;
  out.m = m0;
  Grid2D m_hat = m0;
  Grid2D y(m0.shape());
  out.misfit_trace.reserve(cfg.n_iters);

  for (std::size_t t = 0; t < cfg.n_iters; ++t) {
    try {
      Grid2D v = m_hat;
      axpy(1.0 / sigma, y.flat(), v.flat());
      const Grid2D h = denoise(den, v);
      const double h_scale = cfg.literal_dual_update ? 1.0 : sigma;
      auto yf = y.flat();
      const auto mh = m_hat.flat();
      const auto hf = h.flat();
      for (std::size_t i = 0; i < yf.size(); ++i) yf[i] = yf[i] + sigma * mh[i] - h_scale * hf[i];

      Grid2D arg = out.m;
      axpy(-cfg.tau, y.flat(), arg.flat());
      Grid2D m_next = prox_data(model, arg, cfg.tau, cfg);
      if (!m_next.all_finite()) throw NumericalFailure("non-finite primal iterate");

      auto mhf = m_hat.flat();
      const auto mn = m_next.flat();
      const auto mo = out.m.flat();
      for (std::size_t i = 0; i < mhf.size(); ++i) mhf[i] = mn[i] + cfg.theta * (mn[i] - mo[i]);
      out.m = std::move(m_next);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("pnp_pd_run iteration " + std::to_string(t) + ": " + e.what());
    }
    out.misfit_trace.push_back(model.data_misfit(out.m));
  }
  return out;
}

}  // namespace pnpsvgd
