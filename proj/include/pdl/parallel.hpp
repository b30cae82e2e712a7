// Copyright 2026 The PDL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDL_PARALLEL_HPP_
#define PDL_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pdl {

namespace detail {

inline int read_thread_env() {
  const char* s = std::getenv("PDL_THREADS");
  if (s == nullptr || *s == '\0') return 0;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == nullptr || *end != '\0' || v < 0) return 0;
  return static_cast<int>(std::min(v, 256L));
}

inline int& thread_cap() {
  static int cap = read_thread_env();
  return cap;
}

}  // namespace detail

// Effective worker count. PDL_THREADS=0 (or unset) means one worker per
// hardware thread.
inline int max_threads() {
  int cap = detail::thread_cap();
  if (cap > 0) return cap;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Overrides the PDL_THREADS setting for the current process; 0 restores
// automatic detection. Intended for tests that compare thread counts
// without spawning processes.
inline void set_max_threads(int n) { detail::thread_cap() = n < 0 ? 0 : n; }

// Runs fn(i) for every i in [0, n), possibly on several threads. Iterations
// are split into contiguous chunks so each index always runs exactly once on
// exactly one worker. Callers must write results into per-index slots and do
// any reduction afterwards in index order; that keeps every result bitwise
// independent of the worker count.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t)>& fn) {
  std::size_t workers = static_cast<std::size_t>(max_threads());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, &first_error, &error_mutex, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pdl

#endif  // PDL_PARALLEL_HPP_
