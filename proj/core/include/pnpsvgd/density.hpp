#pragma once

#include <span>

#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

/// Differentiable unnormalized log-density over flattened Grid2D-shaped vectors.
/// Implementations must be immutable and safe to evaluate concurrently.
class LogDensity {
 public:
  virtual ~LogDensity() = default;

  virtual Shape shape() const = 0;
  virtual double log_density(std::span<const double> m) const = 0;
  virtual void gradient(std::span<const double> m, std::span<double> out) const = 0;
  /// Data-misfit diagnostic recorded in sampler traces.
  virtual double misfit(std::span<const double> m) const = 0;
};

}  // namespace pnpsvgd
