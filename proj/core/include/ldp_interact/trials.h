// Copyright 2026 The LDP Interact Authors
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

#ifndef LDP_INTERACT_TRIALS_H_
#define LDP_INTERACT_TRIALS_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "ldp_interact/rng.h"

namespace ldp_interact {

// Worker count from LDP_INTERACT_THREADS, else `fallback`, else the hardware
// concurrency. Always >= 1.
int ThreadCountFromEnv(int fallback = 0);

// Runs fn(trial, rng) for trial in [0, trials) with rng seeded by
// DeriveSeed(seed, trial), on up to `threads` workers. Results come back in
// trial order, so output is identical for every thread count.
template <typename Fn>
auto RunTrials(std::int64_t trials, std::uint64_t seed, int threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::int64_t, SeededRng&>> {
  using Result = std::invoke_result_t<Fn&, std::int64_t, SeededRng&>;
  std::vector<std::optional<Result>> slots(
      static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
  auto work = [&](std::atomic<std::int64_t>& next) {
    for (std::int64_t t = next++; t < trials; t = next++) {
      SeededRng rng(DeriveSeed(seed, static_cast<std::uint64_t>(t)));
      slots[static_cast<std::size_t>(t)].emplace(fn(t, rng));
    }
  };
  std::atomic<std::int64_t> next{0};
  const int workers = static_cast<int>(
      std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(trials, 1)));
  if (workers == 1) {
    work(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, std::ref(next));
    for (std::thread& th : pool) th.join();
  }
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace ldp_interact

#endif  // LDP_INTERACT_TRIALS_H_
