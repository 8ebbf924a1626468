#include "pnpsvgd/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "pnpsvgd/errors.hpp"
#include "pnpsvgd/parallel.hpp"

namespace pnpsvgd {

std::vector<double> pairwise_sq_distances(const Ensemble& e) {
  const std::size_t n = e.n();
  const std::size_t d = e.dim();
  std::vector<double> dist(n * n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto a = e.particle(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = e.particle(j);
      double s = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double diff = a[l] - b[l];
        s += diff * diff;
      }
      dist[i * n + j] = s;
      dist[j * n + i] = s;
    }
  });
  return dist;
}

double median_bandwidth(std::span<const double> sq_dist, std::size_t n) {
  if (n < 2) throw InvalidArgument("median_bandwidth needs at least two particles");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.push_back(std::sqrt(sq_dist[i * n + j]));
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double med = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (lower + med);
  }
  return std::max(med, kBandwidthFloor);
}

double median_bandwidth(const Ensemble& e) {
  if (e.n() < 2) throw InvalidArgument("median_bandwidth needs at least two particles");
  return median_bandwidth(pairwise_sq_distances(e), e.n());
}

KernelEval kernel_eval(const Ensemble& e, double sigma, std::span<const double> sq_dist) {
  if (!(sigma > 0.0)) throw InvalidArgument("kernel bandwidth must be positive");
  const std::size_t n = e.n();
  const std::size_t d = e.dim();
  if (sq_dist.size() != n * n) throw ShapeError("kernel_eval: distance matrix must be n x n");
  KernelEval ke;
  ke.sigma = sigma;
  ke.k_matrix.resize(n * n);
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (std::size_t i = 0; i < n * n; ++i) ke.k_matrix[i] = std::exp(-sq_dist[i] * inv_s2);
  for (std::size_t i = 0; i < n; ++i) ke.k_matrix[i * n + i] = 1.0;

  ke.grad_sums.assign(n * d, 0.0);
  const double scale = 2.0 * inv_s2;
  parallel_for(n, [&](std::size_t i) {
    const auto mi = e.particle(i);
    double* out = ke.grad_sums.data() + i * d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = scale * ke.k_matrix[j * n + i];
      const auto mj = e.particle(j);
      for (std::size_t l = 0; l < d; ++l) out[l] += w * (mi[l] - mj[l]);
    }
  });
  return ke;
}

KernelEval kernel_eval(const Ensemble& e, double sigma) {
  return kernel_eval(e, sigma, pairwise_sq_distances(e));
}

std::vector<double> phi_star(const Ensemble& e, std::span<const double> grads, const KernelEval& ke) {
  const std::size_t n = e.n();
  const std::size_t d = e.dim();
  if (grads.size() != n * d) throw ShapeError("phi_star: gradient block must be n x d");
  if (ke.k_matrix.size() != n * n || ke.grad_sums.size() != n * d)
    throw ShapeError("phi_star: kernel evaluation does not match the ensemble");
  std::vector<double> phi(n * d);
  const double inv_n = 1.0 / static_cast<double>(n);
  parallel_for(n, [&](std::size_t i) {
    double* out = phi.data() + i * d;
    const double* rep = ke.grad_sums.data() + i * d;
    std::copy(rep, rep + d, out);
    for (std::size_t j = 0; j < n; ++j) {
      const double k = ke.k_matrix[j * n + i];
      const double* g = grads.data() + j * d;
      for (std::size_t l = 0; l < d; ++l) out[l] += k * g[l];
    }
    for (std::size_t l = 0; l < d; ++l) out[l] *= inv_n;
  });
  return phi;
}

}  // namespace pnpsvgd
