#pragma once
#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace lft {

// Execution policy for the parallel kernels. Every parallel code path has a
// serial twin that walks the identical chunk decomposition, so results are
// bitwise reproducible across policies and worker counts.
enum class Exec { serial, openmp };

inline void set_workers(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace detail {
inline constexpr long reduce_chunk = 256;
}

// Deterministic chunked reduction: the index range is cut into fixed-size
// chunks independent of the thread count, each chunk is accumulated in index
// order, and the chunk partials are folded pairwise in a fixed tree order.
// Floating-point results therefore do not depend on scheduling.
template <class T, class AddItem, class Merge>
T chunked_reduce(long n, T zero, AddItem&& add_item, Merge&& merge, Exec ex) {
  if (n <= 0) return zero;
  const long nchunks = (n + detail::reduce_chunk - 1) / detail::reduce_chunk;
  std::vector<T> partials(static_cast<size_t>(nchunks), zero);
  auto run_chunk = [&](long c) {
    const long lo = c * detail::reduce_chunk;
    const long hi = std::min(n, lo + detail::reduce_chunk);
    T acc = zero;
    for (long i = lo; i < hi; ++i) add_item(i, acc);
    partials[static_cast<size_t>(c)] = std::move(acc);
  };
  if (ex == Exec::openmp) {
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    for (long c = 0; c < nchunks; ++c) run_chunk(c);
  }
  // pairwise fold, order fixed by chunk index
  std::vector<T> level = std::move(partials);
  while (level.size() > 1) {
    std::vector<T> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2) {
      T m = level[i];
      merge(m, level[i + 1]);
      next.push_back(std::move(m));
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

template <class T, class AddItem>
T chunked_sum(long n, T zero, AddItem&& add_item, Exec ex) {
  return chunked_reduce(
      n, std::move(zero), std::forward<AddItem>(add_item),
      [](T& a, const T& b) { a += b; }, ex);
}

// Parallel loop without reduction (independent slots).
template <class F>
void parallel_for(long n, F&& body, Exec ex) {
  if (ex == Exec::openmp) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

}  // namespace lft
