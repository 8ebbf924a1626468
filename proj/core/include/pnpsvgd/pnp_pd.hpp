#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pnpsvgd/denoisers.hpp"
#include "pnpsvgd/grid.hpp"
#include "pnpsvgd/linops.hpp"
#include "pnpsvgd/posterior.hpp"

namespace pnpsvgd {

struct PDConfig {
  double tau = 0.9;
  double sigma_pd = 0.9;
  double theta = 1.0;
  std::size_t n_iters = 100;
  DenoiserSpec denoiser = DenoiserSpec::identity();
  double cg_tol = 1.0e-8;
  std::size_t cg_maxiter = 200;
  /// When true the denoiser runs at strength 1/sigma_pd (or denoiser_strength if set).
  bool bind_denoiser_strength = true;
  std::optional<double> denoiser_strength;
  /// Drop the sigma factor in front of the denoiser in the dual update.
  bool literal_dual_update = false;

  /// Rejects tau * sigma_pd >= 1 (the step condition with ||K|| = 1).
  void validate() const;
  DenoiserSpec effective_denoiser() const;
};

using GridOperator = std::function<Grid2D(const Grid2D&)>;

struct CGResult {
  Grid2D x;
  std::size_t iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for a symmetric positive definite operator.
/// Stops when ||A x - b|| <= tol ||b||. Non-positive curvature throws NumericalFailure.
CGResult cg_solve(const GridOperator& apply_A, const Grid2D& b, double tol, std::size_t maxiter,
                  const Grid2D* x0 = nullptr);

/// prox of tau * (w/2)||G y - d||^2 at v: solves (I + tau w G^T G) y = v + tau w G^T d.
CGResult prox_quadratic(const LinOp& op, const Grid2D& d, double weight, const Grid2D& v, double tau,
                        double cg_tol, std::size_t cg_maxiter);
Grid2D prox_data(const PosteriorModel& model, const Grid2D& v, double tau, const PDConfig& cfg);

struct PDResult {
  Grid2D m;
  /// 1/2 ||G m_t - d||^2 after every iteration.
  std::vector<double> misfit_trace;
};

/// Plug-and-play primal-dual with K = I, y_0 = 0:
///   y     <- y + sigma m_hat - sigma H(y / sigma + m_hat)
///   m_new <- prox_{tau f}(m - tau y)
///   m_hat <- m_new + theta (m_new - m)
/// f is the data term of `model`; the denoiser takes the place of the prior.
PDResult pnp_pd_run(const PosteriorModel& model, const Grid2D& m0, const PDConfig& cfg);

}  // namespace pnpsvgd
