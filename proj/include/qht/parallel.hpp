#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qht::par {

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Deterministic chunked map-reduce over [0, count).  Work is split into
// fixed-size chunks (independent of the worker count); each chunk is reduced
// serially by `map_chunk`, and chunk partials are folded in a fixed binary
// tree over chunk indices.  Results are therefore identical for any number
// of threads, including one.
template <class T, class MapChunk, class Combine>
T chunked_reduce(std::int64_t count, std::int64_t chunk_size, T identity,
                 const MapChunk& map_chunk, const Combine& combine,
                 bool parallel = true) {
  if (count <= 0) return identity;
  std::int64_t n_chunks = (count + chunk_size - 1) / chunk_size;
  std::vector<T> partial(static_cast<std::size_t>(n_chunks), identity);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n_chunks > 1)
#endif
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    std::int64_t lo = c * chunk_size;
    std::int64_t hi = std::min(count, lo + chunk_size);
    partial[static_cast<std::size_t>(c)] = map_chunk(lo, hi);
  }
  // fixed binary-tree fold over chunk order
  std::size_t m = partial.size();
  while (m > 1) {
    std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i + half < m; ++i)
      partial[i] = combine(partial[i], partial[i + half]);
    m = half;
  }
  return partial[0];
}

}  // namespace qht::par
