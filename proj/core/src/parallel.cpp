#include "seunet/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace seunet {

int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("SEUNET_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }();
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = static_cast<std::size_t>(thread_count());
  if (workers <= 1 || n < 2 * workers) {
    if (n) body(0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = n * w / workers;
    const std::size_t e = n * (w + 1) / workers;
    if (b < e) threads.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, n * 1 / workers);
  for (auto& t : threads) t.join();
}

}  // namespace seunet
