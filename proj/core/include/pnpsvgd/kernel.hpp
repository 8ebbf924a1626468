#pragma once

#include <span>
#include <vector>

#include "pnpsvgd/ensemble.hpp"

namespace pnpsvgd {

/// RBF kernel k(a, b) = exp(-||a - b||^2 / sigma^2) evaluated on an ensemble.
struct KernelEval {
  double sigma = 1.0;
  /// n x n, row-major. Symmetric with unit diagonal.
  std::vector<double> k_matrix;
  /// n x d: row i = sum_j grad_{m_j} k(m_j, m_i) = sum_j (2/sigma^2)(m_i - m_j) k_ij.
  std::vector<double> grad_sums;
};

inline constexpr double kBandwidthFloor = 1.0e-8;

/// n x n matrix of squared Euclidean distances (exact differences, no Gram trick).
std::vector<double> pairwise_sq_distances(const Ensemble& e);

/// Median of the n(n-1)/2 pairwise distances, floored at kBandwidthFloor.
/// Even counts take the mean of the two middle values.
double median_bandwidth(const Ensemble& e);
double median_bandwidth(std::span<const double> sq_dist, std::size_t n);

KernelEval kernel_eval(const Ensemble& e, double sigma);
KernelEval kernel_eval(const Ensemble& e, double sigma, std::span<const double> sq_dist);

/// Empirical Stein direction:
/// phi(m_i) = (1/n) [ sum_j k_ji grads_j + grad_sums_i ].
std::vector<double> phi_star(const Ensemble& e, std::span<const double> grads, const KernelEval& ke);

}  // namespace pnpsvgd
