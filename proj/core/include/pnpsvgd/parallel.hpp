#pragma once

#include <cstddef>
#include <functional>

namespace pnpsvgd {

/// Process-wide cap on worker threads used by per-particle and per-trace loops.
/// Results never depend on this value: every parallel loop writes disjoint
/// outputs and keeps a fixed per-item summation order.
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs body(i) for i in [0, count). Items are split into contiguous blocks.
/// The first exception thrown by any block is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pnpsvgd
