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

#ifndef LDP_INTERACT_RNG_H_
#define LDP_INTERACT_RNG_H_

#include <cstdint>
#include <limits>

namespace ldp_interact {

// Mixes a 64-bit word with the SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for the `index`-th child stream of `seed`. Children of the same parent
// are independent streams; the mapping is stable across platforms.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return Mix64(Mix64(seed ^ 0x6A09E667F3BCC909ULL) + Mix64(index + 1));
}

// Counter-based generator: the k-th output is Mix64(seed + k * golden_gamma).
// Identical seed and call sequence give identical outputs everywhere. A
// SeededRng is single-owner; parallel work should Split() instead of sharing.
//
// Satisfies UniformRandomBitGenerator so it can drive <random> adaptors, but
// the sampling helpers below are used internally because libstdc++ and libc++
// disagree on distribution algorithms.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed) : seed_(seed), counter_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    ++counter_;
    return Mix64(seed_ + counter_ * kGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1].
  double UniformOpenZero() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t UniformInt(std::uint64_t bound);

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);

  // Independent child stream; does not advance this generator.
  SeededRng Split(std::uint64_t index) const {
    return SeededRng(DeriveSeed(seed_, index));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace ldp_interact

#endif  // LDP_INTERACT_RNG_H_
