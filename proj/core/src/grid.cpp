#include "pnpsvgd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {

Grid2D::Grid2D(std::size_t nt, std::size_t nx, double fill) : nt_(nt), nx_(nx), values_(nt * nx, fill) {
  if (nt == 0 || nx == 0) throw ShapeError("Grid2D dimensions must be positive");
}

Grid2D::Grid2D(std::size_t nt, std::size_t nx, std::vector<double> values)
    : nt_(nt), nx_(nx), values_(std::move(values)) {
  if (nt == 0 || nx == 0) throw ShapeError("Grid2D dimensions must be positive");
  if (values_.size() != nt * nx) {
    throw ShapeError("Grid2D expects " + std::to_string(nt * nx) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Grid2D Grid2D::unflatten(Shape shape, std::span<const double> flat) {
  return Grid2D(shape.nt, shape.nx, std::vector<double>(flat.begin(), flat.end()));
}

bool Grid2D::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(std::span<const double> a) { return dot(a, a); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void require_same_shape(const Grid2D& a, const Grid2D& b, const char* context) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(context) + ": shape mismatch (" + std::to_string(a.nt()) + "x" +
                     std::to_string(a.nx()) + " vs " + std::to_string(b.nt()) + "x" +
                     std::to_string(b.nx()) + ")");
  }
}

}  // namespace pnpsvgd
