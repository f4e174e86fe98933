// Copyright 2026 The LingMess-cpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LINGMESS_SRC_PARALLEL_H_
#define LINGMESS_SRC_PARALLEL_H_

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lingmess::internal {

// Runs fn(i) for i in [0, n) on up to `threads` workers. fn must only write
// to per-index state. The first exception thrown is rethrown.
template <typename Fn>
void ParallelFor(size_t n, int threads, Fn &&fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const size_t workers = std::min<size_t>(threads, n);
  for (size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lingmess::internal

#endif  // LINGMESS_SRC_PARALLEL_H_
