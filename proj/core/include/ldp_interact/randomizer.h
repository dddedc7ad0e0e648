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

#ifndef LDP_INTERACT_RANDOMIZER_H_
#define LDP_INTERACT_RANDOMIZER_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

// Slack allowed when checking a table against a privacy parameter.
inline constexpr double kPrivacySlack = 1e-9;

// A local randomizer given as an exact table: one distribution over `range`
// for every symbol of `domain`. Immutable; safe to share across threads.
class Randomizer {
 public:
  // Empty table; only useful as a placeholder before assignment.
  Randomizer() = default;

  // Validates that every row is a distribution over the range (rows within
  // 1e-9 of summing to one are renormalized), that domain and range symbols
  // are distinct, and that the table is (declared_eps, declared_delta)-DP.
  static absl::StatusOr<Randomizer> Create(
      std::vector<Symbol> domain, std::vector<Symbol> range,
      std::vector<std::vector<double>> rows, double declared_eps,
      double declared_delta = 0.0, std::string name = "");

  std::span<const Symbol> domain() const { return domain_; }
  std::span<const Symbol> range() const { return range_; }
  std::size_t domain_size() const { return domain_.size(); }
  std::size_t range_size() const { return range_.size(); }
  double declared_eps() const { return declared_eps_; }
  double declared_delta() const { return declared_delta_; }
  const std::string& name() const { return name_; }

  // Row for the domain symbol at position `x_index`.
  std::span<const double> Row(std::size_t x_index) const {
    return {table_.data() + x_index * range_.size(), range_.size()};
  }
  double Prob(std::size_t x_index, std::size_t y_index) const {
    return table_[x_index * range_.size() + y_index];
  }
  // Row as a FiniteDist over the range.
  FiniteDist RowDist(std::size_t x_index) const;

  // Positions of symbols, or -1 when absent.
  std::ptrdiff_t DomainIndex(Symbol x) const;
  std::ptrdiff_t RangeIndex(Symbol y) const;

  // Draws a range position from the row at `x_index`.
  std::size_t SampleIndex(std::size_t x_index, SeededRng& rng) const;

 private:
  std::vector<Symbol> domain_;
  std::vector<Symbol> range_;
  std::vector<double> table_;
  double declared_eps_ = 0.0;
  double declared_delta_ = 0.0;
  std::string name_;
  bool dense_domain_ = false;
  bool dense_range_ = false;
};

// Randomized response on {0, ..., k-1}: the true symbol with probability
// e^eps / (e^eps + k - 1), every other symbol with 1 / (e^eps + k - 1).
absl::StatusOr<Randomizer> MakeRandomizedResponse(int k, double eps);

// Data-independent coin: every row is (1 - p, p) over {0, 1}.
absl::StatusOr<Randomizer> MakeBernoulli(double p, int domain_size = 2);

// max over x, x', y of ln(row(x)(y) / row(x')(y)): the smallest eps for which
// the table is (eps, 0)-DP. Returns +infinity when some message has zero
// probability under one datum and positive probability under another.
double MinimalEps(const Randomizer& r);

// True when row(x)(y) <= e^eps row(x')(y) + delta for every x, x', y, up to
// kPrivacySlack.
bool SatisfiesDp(const Randomizer& r, double eps, double delta = 0.0);

// Draws y ~ row(x). InvalidArgument when x is not in the domain.
absl::StatusOr<Symbol> Apply(const Randomizer& r, Symbol x, SeededRng& rng);

// r(x) = gamma * r_tilde(x) + (1 - gamma) * mu with mu = r(anchor) and
// r_tilde a 2*eps-DP randomizer.
struct Decomposition {
  double gamma = 0.0;
  FiniteDist mu = FiniteDist::PointMass(0);
  Randomizer r_tilde;
  double eps_prime = 0.0;
  double eps = 0.0;
  Symbol anchor_x0 = 0;
  // Set when eps_prime == 0: gamma is 0 and r_tilde repeats mu.
  bool degenerate = false;
};

// Splits a pure-DP randomizer into a data-independent part and a 2*eps-DP
// part. gamma = (e^{-eps'} - 1) / (e^{-eps} - 1) where eps' = MinimalEps(r),
// and r_tilde(x) = r(x0) + (r(x) - r(x0)) / gamma.
//
// InvalidArgument when r has delta > 0 or unbounded eps', when
// eps < eps', or when `anchor_x0` is not in the domain.
absl::StatusOr<Decomposition> Decompose(const Randomizer& r, double eps,
                                        Symbol anchor_x0);
// Anchored at the first domain symbol.
absl::StatusOr<Decomposition> Decompose(const Randomizer& r, double eps);

// gamma * r_tilde(x)(y) + (1 - gamma) * mu(y), by positions.
double MixtureProb(const Decomposition& d, std::size_t x_index,
                   std::size_t y_index);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_RANDOMIZER_H_
