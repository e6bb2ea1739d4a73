// Copyright 2026 The fdpaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FDP_THREADING_HPP_
#define FDP_THREADING_HPP_

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fdp {

inline int default_threads() {
  if (const char* env = std::getenv("FDPAUDIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// Runs fn(begin, end) over contiguous chunks of [0, n). Work must be
// addressed by index only (counter-based randomness), so the partition
// cannot affect results.
template <typename Fn>
void parallel_for(uint64_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    fn(uint64_t{0}, n);
    return;
  }
  const uint64_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    const uint64_t lo = chunk * t;
    if (lo >= n) break;
    const uint64_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fdp

#endif  // FDP_THREADING_HPP_
