#include "pnpsvgd/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {

Ensemble::Ensemble(std::size_t n, Shape shape, std::vector<double> particles)
    : n_(n), shape_(shape), data_(std::move(particles)) {
  if (n == 0) throw InvalidArgument("Ensemble needs at least one particle");
  if (shape.size() == 0) throw ShapeError("Ensemble particle shape must be non-empty");
  if (data_.size() != n * shape.size()) throw ShapeError("Ensemble storage does not match n x d");
}

Ensemble::Ensemble(std::size_t n, Shape shape, double fill)
    : Ensemble(n, shape, std::vector<double>(n * shape.size(), fill)) {}

bool Ensemble::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace pnpsvgd
