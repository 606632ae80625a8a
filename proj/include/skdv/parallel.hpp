#ifndef SKDV_PARALLEL_HPP
#define SKDV_PARALLEL_HPP

#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace skdv {

// Static block partition over [0, n). Each worker writes only to its own
// indices, so results are identical for any thread count.
inline void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr first_error = nullptr;
  std::mutex err_mtx;
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += n_threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mtx);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace skdv

#endif
