#include "pnpsvgd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pnpsvgd {
namespace {
std::atomic<std::size_t> g_max_threads{1};
}

void set_max_threads(std::size_t n) { g_max_threads.store(std::max<std::size_t>(n, 1)); }

std::size_t max_threads() { return g_max_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  // One slot per block; the lowest failing block wins so the reported error
  // is the same for any worker count.
  std::vector<std::exception_ptr> errors(workers);
  auto run_block = [&](std::size_t block, std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) body(i);
    } catch (...) {
      errors[block] = std::current_exception();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back(run_block, w, begin, end);
  }
  run_block(0, 0, std::min(count, chunk));
  pool.clear();

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pnpsvgd
