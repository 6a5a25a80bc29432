#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qntk {

inline int resolve_workers(int workers) {
  if (workers > 0) {
    return workers;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// Chunk layout depends only on the total count, never on the worker count,
// so per-chunk partial results combine to bit-identical totals regardless
// of parallelism.
inline std::int64_t chunk_size_for(std::int64_t total) {
  const std::int64_t target = total / 64;
  if (target < 64) {
    return 64;
  }
  if (target > 16384) {
    return 16384;
  }
  return target;
}

inline std::int64_t chunk_count_for(std::int64_t total) {
  const std::int64_t c = chunk_size_for(total);
  return (total + c - 1) / c;
}

// body(chunk_index, begin, end) over [0, total); chunks are claimed by a
// shared counter, results must be stored per chunk index by the caller and
// merged in index order afterwards.
template <class Body>
void for_each_chunk(std::int64_t total, int workers, Body&& body) {
  if (total <= 0) {
    return;
  }
  const std::int64_t chunk = chunk_size_for(total);
  const std::int64_t nchunks = (total + chunk - 1) / chunk;
  workers = resolve_workers(workers);
  if (workers <= 1 || nchunks == 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      body(c, c * chunk, std::min(total, (c + 1) * chunk));
    }
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= nchunks) {
          break;
        }
        body(c, c * chunk, std::min(total, (c + 1) * chunk));
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!error) {
        error = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = int(std::min<std::int64_t>(workers, nchunks));
  pool.reserve(std::size_t(nthreads));
  for (int i = 0; i < nthreads; ++i) {
    pool.emplace_back(run);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace qntk
