#include "pnpsvgd/linops.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Grid2D diff_t(const Grid2D& in, bool adjoint) {
  const std::size_t nt = in.nt(), nx = in.nx();
  Grid2D out(nt, nx);
  if (!adjoint) {
    for (std::size_t it = 0; it + 1 < nt; ++it)
      for (std::size_t ix = 0; ix < nx; ++ix) out(it, ix) = in(it + 1, ix) - in(it, ix);
    return out;
  }
  // Transpose of the bidiagonal matrix with a zero last row.
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double v = 0.0;
      if (it >= 1) v += in(it - 1, ix);
      if (it + 1 < nt) v -= in(it, ix);
      out(it, ix) = v;
    }
  }
  return out;
}

Grid2D diff_x(const Grid2D& in, bool adjoint) {
  const std::size_t nt = in.nt(), nx = in.nx();
  Grid2D out(nt, nx);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (!adjoint) {
        if (ix + 1 < nx) out(it, ix) = in(it, ix + 1) - in(it, ix);
      } else {
        double v = 0.0;
        if (ix >= 1) v += in(it, ix - 1);
        if (ix + 1 < nx) v -= in(it, ix);
        out(it, ix) = v;
      }
    }
  }
  return out;
}

// out[i] = sum_k w[k] in[i + c - k]  (forward)
// out[j] = sum_k w[k] in[j - c + k]  (adjoint)
// Accumulation runs over k ascending for every output sample.
Grid2D convolve_t(const Grid2D& in, const Wavelet& w, bool adjoint) {
  const std::size_t nt = in.nt(), nx = in.nx();
  const auto len = static_cast<std::ptrdiff_t>(w.samples.size());
  const auto c = static_cast<std::ptrdiff_t>(w.center());
  Grid2D out(nt, nx);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nt); ++i) {
    double* dst = &out(static_cast<std::size_t>(i), 0);
    for (std::ptrdiff_t k = 0; k < len; ++k) {
      const std::ptrdiff_t j = adjoint ? i - c + k : i + c - k;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(nt)) continue;
      const double wk = w.samples[static_cast<std::size_t>(k)];
      const double* src = in.flat().data() + static_cast<std::size_t>(j) * nx;
      for (std::size_t ix = 0; ix < nx; ++ix) dst[ix] += wk * src[ix];
    }
  }
  return out;
}

Grid2D stack_tv(const Grid2D& in, bool adjoint) {
  const std::size_t nx = in.nx();
  if (!adjoint) {
    const std::size_t nt = in.nt();
    const Grid2D dt = diff_t(in, false);
    const Grid2D dx = diff_x(in, false);
    std::vector<double> v;
    v.reserve(2 * nt * nx);
    v.insert(v.end(), dt.values().begin(), dt.values().end());
    v.insert(v.end(), dx.values().begin(), dx.values().end());
    return Grid2D(2 * nt, nx, std::move(v));
  }
  if (in.nt() % 2 != 0) throw ShapeError("StackTV adjoint expects an even number of rows");
  const std::size_t nt = in.nt() / 2;
  const auto flat = in.flat();
  const Grid2D top = Grid2D::unflatten({nt, nx}, flat.subspan(0, nt * nx));
  const Grid2D bottom = Grid2D::unflatten({nt, nx}, flat.subspan(nt * nx, nt * nx));
  Grid2D out = diff_t(top, true);
  const Grid2D bx = diff_x(bottom, true);
  axpy(1.0, bx.flat(), out.flat());
  return out;
}

}  // namespace

Wavelet ricker_wavelet(double peak_freq, double dt, std::size_t half_len) {
  if (!(peak_freq > 0.0)) throw InvalidArgument("ricker_wavelet: peak_freq must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("ricker_wavelet: dt must be positive");
  if (half_len < 1) throw InvalidArgument("ricker_wavelet: half_len must be at least 1");
  Wavelet w;
  w.dt = dt;
  w.peak_freq = peak_freq;
  w.samples.resize(2 * half_len + 1);
  const double pf2 = std::numbers::pi * std::numbers::pi * peak_freq * peak_freq;
  for (std::size_t k = 0; k < w.samples.size(); ++k) {
    const double t = (static_cast<double>(k) - static_cast<double>(half_len)) * dt;
    const double a = pf2 * t * t;
    w.samples[k] = (1.0 - 2.0 * a) * std::exp(-a);
  }
  return w;
}

LinOp LinOp::convolve_t(Wavelet w) {
  if (w.samples.empty() || w.samples.size() % 2 == 0)
    throw InvalidArgument("ConvolveT requires an odd-length wavelet");
  return LinOp(ConvolveT{std::move(w)});
}

Shape LinOp::range_shape(Shape domain) const {
  return std::visit(Overloaded{
                        [&](const StackTV&) { return Shape{2 * domain.nt, domain.nx}; },
                        [&](const Compose& c) {
                          Shape s = domain;
                          for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) s = it->range_shape(s);
                          return s;
                        },
                        [&](const auto&) { return domain; },
                    },
                    kind_);
}

Shape LinOp::domain_shape(Shape range) const {
  return std::visit(Overloaded{
                        [&](const StackTV&) {
                          if (range.nt % 2 != 0)
                            throw ShapeError("StackTV range must have an even number of rows");
                          return Shape{range.nt / 2, range.nx};
                        },
                        [&](const Compose& c) {
                          Shape s = range;
                          for (const auto& op : c.ops) s = op.domain_shape(s);
                          return s;
                        },
                        [&](const auto&) { return range; },
                    },
                    kind_);
}

std::string LinOp::describe() const {
  return std::visit(Overloaded{
                        [](const Identity&) { return std::string("Identity"); },
                        [](const DerivativeT&) { return std::string("DerivativeT"); },
                        [](const DerivativeX&) { return std::string("DerivativeX"); },
                        [](const ConvolveT& c) {
                          return "ConvolveT(len=" + std::to_string(c.wavelet.samples.size()) + ")";
                        },
                        [](const StackTV&) { return std::string("StackTV"); },
                        [](const Compose& c) {
                          std::string s = "Compose[";
                          for (std::size_t i = 0; i < c.ops.size(); ++i) {
                            if (i) s += ", ";
                            s += c.ops[i].describe();
                          }
                          return s + "]";
                        },
                    },
                    kind_);
}

LinOp post_stack_operator(const Wavelet& w) {
  return LinOp::compose({LinOp::convolve_t(w), LinOp::derivative_t()});
}

Grid2D apply(const LinOp& op, const Grid2D& input, bool adjoint) {
  if (input.size() == 0) throw ShapeError("apply: empty input grid");
  return std::visit(Overloaded{
                        [&](const LinOp::Identity&) { return input; },
                        [&](const LinOp::DerivativeT&) { return diff_t(input, adjoint); },
                        [&](const LinOp::DerivativeX&) { return diff_x(input, adjoint); },
                        [&](const LinOp::ConvolveT& c) { return convolve_t(input, c.wavelet, adjoint); },
                        [&](const LinOp::StackTV&) { return stack_tv(input, adjoint); },
                        [&](const LinOp::Compose& c) {
                          Grid2D x = input;
                          if (!adjoint) {
                            for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) x = apply(*it, x, false);
                          } else {
                            for (const auto& o : c.ops) x = apply(o, x, true);
                          }
                          return x;
                        },
                    },
                    op.kind());
}

double dot_test(const LinOp& op, std::size_t nt, std::size_t nx, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("dot_test: trials must be at least 1");
  const Shape domain{nt, nx};
  const Shape range = op.range_shape(domain);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_grid = [&](Shape s) {
    Grid2D g(s);
    for (double& v : g.flat()) v = normal(rng);
    return g;
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Grid2D x = random_grid(domain);
    const Grid2D y = random_grid(range);
    const double lhs = dot(apply(op, x, false).flat(), y.flat());
    const double rhs = dot(x.flat(), apply(op, y, true).flat());
    const double err =
        std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + std::numeric_limits<double>::epsilon());
    worst = std::max(worst, err);
  }
  return worst;
}

double estimate_norm_sq(const LinOp& op, Shape domain, int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Grid2D x(domain);
  for (double& v : x.flat()) v = normal(rng);
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    const double nx = std::sqrt(norm_sq(x.flat()));
    if (nx == 0.0) return 0.0;
    for (double& v : x.flat()) v /= nx;
    Grid2D y = apply(op, apply(op, x, false), true);
    lambda = dot(x.flat(), y.flat());
    x = std::move(y);
  }
  return lambda;
}

}  // namespace pnpsvgd
