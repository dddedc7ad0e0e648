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

#ifndef LDP_INTERACT_FINITE_DIST_H_
#define LDP_INTERACT_FINITE_DIST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

// Opaque identifier for data and message values.
using Symbol = std::int32_t;

// Construction tolerance: sums within this of 1 are renormalized.
inline constexpr double kNormalizationSlack = 1e-9;

// An exact probability mass function over a finite, ordered support.
// Immutable after construction; safe to share across threads.
class FiniteDist {
 public:
  // Fails if sizes differ, the support is empty or has duplicates, any
  // probability is negative or non-finite, or |sum - 1| > 1e-9. Sums within
  // the slack are renormalized.
  static absl::StatusOr<FiniteDist> Create(std::vector<Symbol> support,
                                           std::vector<double> probs);

  // Support {0, 1, ..., probs.size() - 1}.
  static absl::StatusOr<FiniteDist> FromProbs(std::vector<double> probs);

  static FiniteDist PointMass(Symbol symbol);
  static FiniteDist Uniform(std::size_t k);
  // Bernoulli(p) on {0, 1}; p is clamped to [0, 1].
  static FiniteDist Bernoulli(double p);

  std::span<const Symbol> support() const { return support_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }

  // Probability of `symbol`, zero when it is outside the support.
  double Prob(Symbol symbol) const;
  // Position of `symbol` in the support, or -1.
  std::ptrdiff_t IndexOf(Symbol symbol) const;
  bool Contains(Symbol symbol) const { return IndexOf(symbol) >= 0; }

  // Index into support() drawn with probability probs()[i].
  std::size_t SampleIndex(SeededRng& rng) const;

 private:
  FiniteDist(std::vector<Symbol> support, std::vector<double> probs);

  std::vector<Symbol> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  // True when support_ is exactly 0..n-1, which makes IndexOf O(1).
  bool dense_ = false;
};

// Draws a symbol from `dist`, advancing `rng`.
Symbol Sample(const FiniteDist& dist, SeededRng& rng);

// Distances below are taken over the union of both supports; a symbol absent
// from one side has probability zero there.

// 1/2 * sum_x |p(x) - q(x)|.
double TvDistance(const FiniteDist& p, const FiniteDist& q);

// sum_x p(x) ln(p(x) / q(x)), natural log. InvalidArgument when some x has
// p(x) > 0 and q(x) = 0.
absl::StatusOr<double> KlDivergence(const FiniteDist& p, const FiniteDist& q);

// Squared Hellinger distance 1 - sum_x sqrt(p(x) q(x)).
double HellingerSq(const FiniteDist& p, const FiniteDist& q);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_FINITE_DIST_H_
