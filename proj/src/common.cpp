#include "eigentube/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace eigentube {

namespace {

template <class T>
T pairwise_sum_impl(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum_impl(v.subspan(0, h)) + pairwise_sum_impl(v.subspan(h));
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_sum_impl(v); }

int thread_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("EIGENTUBE_THREADS")) {
      int n = std::atoi(env);
      if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return cached;
}

static constexpr std::size_t kChunk = 1u << 16;

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn,
                     std::size_t chunk) {
  if (n == 0) return;
  std::size_t nchunks = (n + chunk - 1) / chunk;
  int nthreads = std::min<std::size_t>(thread_count(), nchunks);
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::vector<std::future<void>> tasks;
  tasks.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    tasks.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t c = t; c < nchunks; c += nthreads)
        fn(c * chunk, std::min(n, (c + 1) * chunk));
    }));
  }
  for (auto& task : tasks) task.get();
}

double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
  if (n == 0) return 0.0;
  std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partials(nchunks, 0.0);
  int nthreads = std::min<std::size_t>(thread_count(), nchunks);
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      partials[c] = chunk_sum(c * kChunk, std::min(n, (c + 1) * kChunk));
  } else {
    std::vector<std::future<void>> tasks;
    tasks.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      tasks.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t c = t; c < nchunks; c += nthreads)
          partials[c] = chunk_sum(c * kChunk, std::min(n, (c + 1) * kChunk));
      }));
    }
    for (auto& task : tasks) task.get();
  }
  return pairwise_sum(partials);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace eigentube
