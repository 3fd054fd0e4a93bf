#include "glasslab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace glasslab {

int worker_count() {
  if (const char* env = std::getenv("GLASSLAB_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return (int)std::min<long>(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return (int)std::clamp<unsigned>(hw == 0 ? 1 : hw, 1, 64);
}

void for_blocks(std::size_t n, std::size_t block_size, int workers,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  workers = (int)std::min<std::size_t>((std::size_t)std::max(workers, 1), n_blocks);

  if (workers == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b)
      fn(b, b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    while (true) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b, b * block_size, std::min(n, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve((std::size_t)workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

double pairwise_sum(const std::vector<double>& values) {
  // bottom-up tree reduction in index order
  std::vector<double> level = values;
  if (level.empty()) return 0.0;
  while (level.size() > 1) {
    std::vector<double> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) up.push_back(level.back());
    level = std::move(up);
  }
  return level[0];
}

}  // namespace glasslab
