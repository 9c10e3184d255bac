#include "plap/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace plap {

namespace {

std::atomic<int> thread_count{1};

// Below this many items per worker the thread start-up dominates.
constexpr int kMinChunk = 2048;

int workers_for(int n) {
  return std::max(1, std::min(thread_count.load(), n / kMinChunk));
}

}  // namespace

void set_num_threads(int n) { thread_count = std::max(1, n); }

int num_threads() { return thread_count.load(); }

double parallel_sum(int n, const std::function<double(int)>& term) {
  const int workers = workers_for(n);
  if (workers == 1) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(workers, 0.0);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        double s = 0.0;
        for (int i = begin; i < end; ++i) s += term(i);
        partial[w] = s;
      });
    }
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = workers_for(n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
      const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
      for (int i = begin; i < end; ++i) body(i);
    });
  }
}

}  // namespace plap
