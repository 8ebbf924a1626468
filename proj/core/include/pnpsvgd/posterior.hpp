#pragma once

#include "pnpsvgd/density.hpp"
#include "pnpsvgd/grid.hpp"
#include "pnpsvgd/linops.hpp"

namespace pnpsvgd {

struct PosteriorParams {
  /// Likelihood precision; 1 / sigma_d^2 with sigma_d = 1e-2.
  double data_weight = 1.0e4;
  double tikh_weight = 0.1;
  double tv_weight = 0.1;
  /// Smoothing of |x| as sqrt(x^2 + eps^2) so the TV term is differentiable.
  double tv_smooth_eps = 1.0e-8;

  static double weight_from_noise_std(double sigma_d) { return 1.0 / (sigma_d * sigma_d); }
};

/// log pi(m) = -1/2 w ||G m - d||^2
///             -1/2 t (||D_t m||^2 + ||D_x m||^2)
///             -v sum_i [ phi(D_t m)_i + phi(D_x m)_i ],   phi(x) = sqrt(x^2 + eps^2)
/// The normalizing constant is dropped.
class PosteriorModel final : public LogDensity {
 public:
  PosteriorModel(LinOp op, Grid2D d_obs, PosteriorParams params = {});

  const LinOp& op() const noexcept { return op_; }
  const Grid2D& d_obs() const noexcept { return d_obs_; }
  const PosteriorParams& params() const noexcept { return params_; }

  double log_posterior(const Grid2D& m) const;
  Grid2D grad_log_posterior(const Grid2D& m) const;

  /// -w G^T (G m - d)
  Grid2D grad_log_likelihood(const Grid2D& m) const;
  /// Tikhonov + smoothed-TV part of the gradient.
  Grid2D grad_log_prior(const Grid2D& m) const;

  /// 1/2 ||G m - d||^2 (unweighted).
  double data_misfit(const Grid2D& m) const;
  Grid2D residual(const Grid2D& m) const;

  Shape shape() const override { return d_obs_.shape(); }
  double log_density(std::span<const double> m) const override;
  void gradient(std::span<const double> m, std::span<double> out) const override;
  double misfit(std::span<const double> m) const override;

 private:
  void check(const Grid2D& m, const char* context) const;

  LinOp op_;
  Grid2D d_obs_;
  PosteriorParams params_;
};

inline double log_posterior(const PosteriorModel& model, const Grid2D& m) { return model.log_posterior(m); }
inline Grid2D grad_log_posterior(const PosteriorModel& model, const Grid2D& m) {
  return model.grad_log_posterior(m);
}

}  // namespace pnpsvgd
