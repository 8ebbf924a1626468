#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pnpsvgd {

struct Shape {
  std::size_t nt = 0;
  std::size_t nx = 0;

  std::size_t size() const noexcept { return nt * nx; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense nt x nx field stored row-major by time: value(it, ix) = values[it * nx + ix].
/// Column ix is one trace.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t nt, std::size_t nx, double fill = 0.0);
  Grid2D(std::size_t nt, std::size_t nx, std::vector<double> values);
  explicit Grid2D(Shape shape, double fill = 0.0) : Grid2D(shape.nt, shape.nx, fill) {}

  static Grid2D unflatten(Shape shape, std::span<const double> flat);

  std::size_t nt() const noexcept { return nt_; }
  std::size_t nx() const noexcept { return nx_; }
  Shape shape() const noexcept { return {nt_, nx_}; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t it, std::size_t ix) { return values_[it * nx_ + ix]; }
  double operator()(std::size_t it, std::size_t ix) const { return values_[it * nx_ + ix]; }

  std::span<double> flat() noexcept { return values_; }
  std::span<const double> flat() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t nt_ = 0;
  std::size_t nx_ = 0;
  std::vector<double> values_;
};

// Small vector helpers on flat storage. Summation order is always ascending index.
double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

void require_same_shape(const Grid2D& a, const Grid2D& b, const char* context);

}  // namespace pnpsvgd
