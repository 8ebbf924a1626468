#include "pnpsvgd/denoisers.hpp"

#include <algorithm>
#include <cmath>

#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/linops.hpp"

namespace pnpsvgd {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Half-sample symmetric extension: ... c b a | a b c | c b a ...
std::size_t reflect(std::ptrdiff_t j, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t r = j % period;
  if (r < 0) r += period;
  if (r >= static_cast<std::ptrdiff_t>(n)) r = period - 1 - r;
  return static_cast<std::size_t>(r);
}

}  // namespace

DenoiserSpec::Kind DenoiserSpec::effective() const {
  if (!strength) return kind;
  const double s = *strength;
  return std::visit(Overloaded{
                        [&](const Gaussian&) -> Kind {
                          if (s == 0.0) return Identity{};
                          return Gaussian{s};
                        },
                        [&](const TvProx& tv) -> Kind { return TvProx{0.5 * s * s, tv.inner_iters, tv.isotropic}; },
                        [&](const auto& k) -> Kind { return k; },
                    },
                    kind);
}

bool DenoiserSpec::is_identity() const { return std::holds_alternative<Identity>(effective()); }

void DenoiserSpec::validate() const {
  if (strength && !(*strength >= 0.0)) throw InvalidArgument("denoiser strength must be non-negative");
  std::visit(Overloaded{
                 [](const Identity&) {},
                 [](const Gaussian& g) {
                   if (!(g.sigma_blur > 0.0)) throw InvalidArgument("gaussian sigma_blur must be positive");
                 },
                 [](const Median& m) {
                   if (m.window < 3 || m.window % 2 == 0)
                     throw InvalidArgument("median window must be odd and at least 3");
                 },
                 [](const TvProx& tv) {
                   if (!(tv.lambda >= 0.0)) throw InvalidArgument("tv_prox lambda must be non-negative");
                   if (tv.inner_iters < 1) throw InvalidArgument("tv_prox inner_iters must be at least 1");
                 },
             },
             effective());
}

std::string DenoiserSpec::describe() const {
  return std::visit(Overloaded{
                        [](const Identity&) { return std::string("identity"); },
                        [](const Gaussian& g) { return "gaussian(" + std::to_string(g.sigma_blur) + ")"; },
                        [](const Median& m) { return "median(" + std::to_string(m.window) + ")"; },
                        [](const TvProx& tv) {
                          return "tv_prox(" + std::to_string(tv.lambda) + ", " + std::to_string(tv.inner_iters) +
                                 (tv.isotropic ? ", iso)" : ", aniso)");
                        },
                    },
                    effective());
}

Grid2D denoise(const DenoiserSpec& spec, const Grid2D& img) {
  spec.validate();
  return std::visit(Overloaded{
                        [&](const DenoiserSpec::Identity&) { return img; },
                        [&](const DenoiserSpec::Gaussian& g) { return gaussian_denoise(img, g.sigma_blur); },
                        [&](const DenoiserSpec::Median& m) { return median_denoise(img, m.window); },
                        [&](const DenoiserSpec::TvProx& tv) {
                          return tv_prox(img, tv.lambda, tv.inner_iters, tv.isotropic);
                        },
                    },
                    spec.effective());
}

std::vector<double> gaussian_kernel_1d(double sigma_blur) {
  if (!(sigma_blur > 0.0)) throw InvalidArgument("gaussian sigma_blur must be positive");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_blur));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * static_cast<double>(k * k) / (sigma_blur * sigma_blur));
    taps[static_cast<std::size_t>(k + radius)] = v;
    total += v;
  }
  for (double& v : taps) v /= total;
  return taps;
}

Grid2D gaussian_denoise(const Grid2D& img, double sigma_blur) {
  const std::vector<double> taps = gaussian_kernel_1d(sigma_blur);
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const std::size_t nt = img.nt(), nx = img.nx();

  Grid2D along_t(nt, nx);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      const std::size_t src = reflect(static_cast<std::ptrdiff_t>(it) + k, nt);
      const double w = taps[static_cast<std::size_t>(k + radius)];
      for (std::size_t ix = 0; ix < nx; ++ix) along_t(it, ix) += w * img(src, ix);
    }
  }
  Grid2D out(nt, nx);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double s = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        s += taps[static_cast<std::size_t>(k + radius)] * along_t(it, reflect(static_cast<std::ptrdiff_t>(ix) + k, nx));
      }
      out(it, ix) = s;
    }
  }
  return out;
}

Grid2D median_denoise(const Grid2D& img, std::size_t window) {
  if (window < 3 || window % 2 == 0) throw InvalidArgument("median window must be odd and at least 3");
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const std::size_t nt = img.nt(), nx = img.nx();
  Grid2D out(nt, nx);
  std::vector<double> buf(window * window);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      std::size_t c = 0;
      for (std::ptrdiff_t a = -half; a <= half; ++a)
        for (std::ptrdiff_t b = -half; b <= half; ++b)
          buf[c++] = img(reflect(static_cast<std::ptrdiff_t>(it) + a, nt), reflect(static_cast<std::ptrdiff_t>(ix) + b, nx));
      auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
      std::nth_element(buf.begin(), mid, buf.end());
      out(it, ix) = *mid;
    }
  }
  return out;
}

Grid2D tv_prox(const Grid2D& img, double lambda, int inner_iters, bool isotropic) {
  if (!(lambda >= 0.0)) throw InvalidArgument("tv_prox lambda must be non-negative");
  if (inner_iters < 1) throw InvalidArgument("tv_prox inner_iters must be at least 1");
  if (lambda == 0.0) return img;

  // Dual variable p = (p_t; p_x) lives in the StackTV range; y = img - lambda S^T p.
  const LinOp stack = LinOp::stack_tv();
  const std::size_t n = img.size();
  constexpr double kStep = 1.0 / 8.0;
  Grid2D p(2 * img.nt(), img.nx());
  Grid2D y = img;
  for (int k = 0; k < inner_iters; ++k) {
    const Grid2D sy = apply(stack, y, false);
    auto pf = p.flat();
    const auto g = sy.flat();
    const double scale = kStep / lambda;
    for (std::size_t i = 0; i < 2 * n; ++i) pf[i] += scale * g[i];
    if (isotropic) {
      for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::sqrt(pf[i] * pf[i] + pf[n + i] * pf[n + i]);
        if (mag > 1.0) {
          pf[i] /= mag;
          pf[n + i] /= mag;
        }
      }
    } else {
      for (double& v : pf) v = std::clamp(v, -1.0, 1.0);
    }
    y = img;
    axpy(-lambda, apply(stack, p, true).flat(), y.flat());
  }
  return y;
}

double total_variation(const Grid2D& y, bool isotropic) {
  const Grid2D sy = apply(LinOp::stack_tv(), y, false);
  const auto g = sy.flat();
  const std::size_t n = y.size();
  double tv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tv += isotropic ? std::sqrt(g[i] * g[i] + g[n + i] * g[n + i]) : std::abs(g[i]) + std::abs(g[n + i]);
  }
  return tv;
}

}  // namespace pnpsvgd
