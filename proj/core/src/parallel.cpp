#include "lagstokes/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lagstokes {

namespace {
std::atomic<int> g_workers{1};
constexpr std::size_t kMinChunk = 16;
}  // namespace

void set_worker_count(int workers) { g_workers.store(std::max(1, workers)); }

int worker_count() { return g_workers.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(worker_count());
  if (workers <= 1 || count < 2 * kMinChunk) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t chunks = std::min(workers, (count + kMinChunk - 1) / kMinChunk);
  const std::size_t per_chunk = (count + chunks - 1) / chunks;

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_chunk = [&](std::size_t chunk) {
    const std::size_t begin = chunk * per_chunk;
    const std::size_t end = std::min(count, begin + per_chunk);
    try {
      for (std::size_t i = begin; i < end; ++i) body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(chunks - 1);
  for (std::size_t chunk = 1; chunk < chunks; ++chunk) threads.emplace_back(run_chunk, chunk);
  run_chunk(0);
  threads.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lagstokes
