#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

/// n particles, each a flattened Grid2D of the given shape. Storage is
/// particle-major: particle i occupies [i*d, (i+1)*d).
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t n, Shape shape, std::vector<double> particles);
  Ensemble(std::size_t n, Shape shape, double fill = 0.0);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return shape_.size(); }
  Shape shape() const noexcept { return shape_; }

  std::span<double> particle(std::size_t i) { return {data_.data() + i * dim(), dim()}; }
  std::span<const double> particle(std::size_t i) const { return {data_.data() + i * dim(), dim()}; }
  Grid2D particle_grid(std::size_t i) const { return Grid2D::unflatten(shape_, particle(i)); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::size_t n_ = 0;
  Shape shape_{};
  std::vector<double> data_;
};

}  // namespace pnpsvgd
