#ifndef MINGRAPH_PARALLEL_HPP
#define MINGRAPH_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mingraph::parallel {

namespace detail {
inline std::atomic<unsigned>& thread_limit_storage() {
  static std::atomic<unsigned> limit{0};
  return limit;
}
}  // namespace detail

/// Caps the number of worker threads used by every parallel loop; 0 means
/// "use the hardware concurrency".
inline void set_thread_limit(unsigned n) { detail::thread_limit_storage().store(n); }

inline unsigned thread_limit() {
  unsigned n = detail::thread_limit_storage().load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Runs fn(chunk) for chunk in [0, num_chunks). Work items are fixed up front
/// by the caller, so per-chunk results do not depend on the thread count;
/// callers reduce them in chunk order afterwards.
template <class Fn>
void for_each_chunk(std::size_t num_chunks, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_limit(), num_chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= num_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(num_chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Splits [0, count) into fixed-size chunks and maps each to a partial result;
/// the partials come back in chunk order.
template <class T, class Fn>
std::vector<T> map_ranges(std::size_t count, std::size_t chunk_size, Fn&& fn) {
  chunk_size = std::max<std::size_t>(1, chunk_size);
  const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
  std::vector<T> partial(chunks);
  for_each_chunk(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(count, begin + chunk_size);
    partial[c] = fn(begin, end);
  });
  return partial;
}

}  // namespace mingraph::parallel

#endif  // MINGRAPH_PARALLEL_HPP
