#include "forgecast/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace forgecast {

int effective_threads(int requested) {
  int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap_env = std::getenv("FORGECAST_THREADS")) {
    const int cap = std::atoi(cap_env);
    if (cap >= 1 && cap < threads) threads = cap;
  }
  return threads;
}

void parallel_for(Index n, int threads, const std::function<void(Index)>& body) {
  if (n <= 0) return;
  threads = std::min<Index>(threads, n) > 0 ? static_cast<int>(std::min<Index>(threads, n)) : 1;
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const Index i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace forgecast
