#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

/// Odd-length, zero-phase wavelet. samples[center()] is the t = 0 sample.
struct Wavelet {
  std::vector<double> samples;
  double dt = 0.0;
  double peak_freq = 0.0;

  std::size_t center() const noexcept { return samples.size() / 2; }
};

/// Ricker wavelet (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2) sampled at t = k*dt, k in [-half_len, half_len].
Wavelet ricker_wavelet(double peak_freq, double dt, std::size_t half_len);

/// Matrix-free linear operator on Grid2D, described declaratively.
///
/// Boundary conventions (fixed, so that the adjoints are exact transposes):
///  - DerivativeT / DerivativeX: forward difference along time / traces, with the
///    last row / column of the output set to zero.
///  - ConvolveT: "same"-length convolution of every trace with the wavelet,
///    zero-padded; the adjoint is zero-padded correlation.
///  - StackTV: [DerivativeT; DerivativeX] stacked along time, so an nt x nx
///    input maps to a 2nt x nx output.
///  - Compose: applies the list right-to-left; an empty list is the identity.
class LinOp {
 public:
  struct Identity {};
  struct DerivativeT {};
  struct DerivativeX {};
  struct ConvolveT {
    Wavelet wavelet;
  };
  struct StackTV {};
  struct Compose {
    std::vector<LinOp> ops;
  };
  using Kind = std::variant<Identity, DerivativeT, DerivativeX, ConvolveT, StackTV, Compose>;

  LinOp() : kind_(Identity{}) {}

  static LinOp identity() { return LinOp(Identity{}); }
  static LinOp derivative_t() { return LinOp(DerivativeT{}); }
  static LinOp derivative_x() { return LinOp(DerivativeX{}); }
  static LinOp convolve_t(Wavelet w);
  static LinOp stack_tv() { return LinOp(StackTV{}); }
  static LinOp compose(std::vector<LinOp> ops) { return LinOp(Compose{std::move(ops)}); }

  const Kind& kind() const noexcept { return kind_; }

  /// Output shape of the forward operator for a given input shape.
  Shape range_shape(Shape domain) const;
  /// Input shape of the forward operator given its output shape; throws ShapeError
  /// when no domain maps onto `range`.
  Shape domain_shape(Shape range) const;

  std::string describe() const;

 private:
  explicit LinOp(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Post-stack modeling operator G = W D (wavelet convolution after time derivative).
LinOp post_stack_operator(const Wavelet& w);

/// Forward (adjoint == false) or transposed application.
Grid2D apply(const LinOp& op, const Grid2D& input, bool adjoint = false);

/// max over trials of |<Ax,y> - <x,A^T y>| / (|<Ax,y>| + |<x,A^T y>| + eps).
double dot_test(const LinOp& op, std::size_t nt, std::size_t nx, int trials, std::uint64_t seed);

/// Power-iteration estimate of ||A||_2^2 on the given domain.
double estimate_norm_sq(const LinOp& op, Shape domain, int iters = 50, std::uint64_t seed = 7);

}  // namespace pnpsvgd
