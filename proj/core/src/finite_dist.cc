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

#include "ldp_interact/finite_dist.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldp_interact {
namespace {

// Aligned probability pairs over the union of the two supports.
std::vector<std::pair<double, double>> Align(const FiniteDist& p,
                                             const FiniteDist& q) {
  std::map<Symbol, std::pair<double, double>> cells;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cells[p.support()[i]].first += p.probs()[i];
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    cells[q.support()[i]].second += q.probs()[i];
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(cells.size());
  for (const auto& [symbol, pq] : cells) out.push_back(pq);
  return out;
}

}  // namespace

FiniteDist::FiniteDist(std::vector<Symbol> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  dense_ = true;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] != static_cast<Symbol>(i)) {
      dense_ = false;
      break;
    }
  }
}

absl::StatusOr<FiniteDist> FiniteDist::Create(std::vector<Symbol> support,
                                              std::vector<double> probs) {
  if (support.empty()) {
    return absl::InvalidArgumentError("distribution support is empty");
  }
  if (support.size() != probs.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("support has ", support.size(), " symbols but ",
                     probs.size(), " probabilities were given"));
  }
  std::unordered_set<Symbol> seen;
  for (Symbol s : support) {
    if (!seen.insert(s).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate support symbol ", s));
    }
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("probability ", p, " is not a finite non-negative real"));
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > kNormalizationSlack) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", not 1"));
  }
  for (double& p : probs) p /= total;
  return FiniteDist(std::move(support), std::move(probs));
}

absl::StatusOr<FiniteDist> FiniteDist::FromProbs(std::vector<double> probs) {
  std::vector<Symbol> support(probs.size());
  std::iota(support.begin(), support.end(), 0);
  return Create(std::move(support), std::move(probs));
}

FiniteDist FiniteDist::PointMass(Symbol symbol) {
  return FiniteDist({symbol}, {1.0});
}

FiniteDist FiniteDist::Uniform(std::size_t k) {
  std::vector<Symbol> support(k);
  std::iota(support.begin(), support.end(), 0);
  return FiniteDist(std::move(support),
                    std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

FiniteDist FiniteDist::Bernoulli(double p) {
  p = std::clamp(p, 0.0, 1.0);
  return FiniteDist({0, 1}, {1.0 - p, p});
}

std::ptrdiff_t FiniteDist::IndexOf(Symbol symbol) const {
  if (dense_) {
    return (symbol >= 0 && static_cast<std::size_t>(symbol) < support_.size())
               ? symbol
               : -1;
  }
  auto it = std::find(support_.begin(), support_.end(), symbol);
  return it == support_.end() ? -1 : it - support_.begin();
}

double FiniteDist::Prob(Symbol symbol) const {
  const std::ptrdiff_t i = IndexOf(symbol);
  return i < 0 ? 0.0 : probs_[static_cast<std::size_t>(i)];
}

std::size_t FiniteDist::SampleIndex(SeededRng& rng) const {
  const double u = rng.Uniform() * cdf_.back();
  // Skip zero-mass cells so they can never be returned.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  if (i >= cdf_.size()) i = cdf_.size() - 1;
  while (probs_[i] == 0.0 && i > 0) --i;
  return i;
}

Symbol Sample(const FiniteDist& dist, SeededRng& rng) {
  return dist.support()[dist.SampleIndex(rng)];
}

double TvDistance(const FiniteDist& p, const FiniteDist& q) {
  double sum = 0.0;
  for (const auto& [a, b] : Align(p, q)) sum += std::fabs(a - b);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

absl::StatusOr<double> KlDivergence(const FiniteDist& p, const FiniteDist& q) {
  double sum = 0.0;
  for (const auto& [a, b] : Align(p, q)) {
    if (a == 0.0) continue;
    if (b == 0.0) {
      return absl::InvalidArgumentError(
          "KL divergence undefined: p has mass where q has none");
    }
    sum += a * std::log(a / b);
  }
  return std::max(sum, 0.0);
}

double HellingerSq(const FiniteDist& p, const FiniteDist& q) {
  double affinity = 0.0;
  for (const auto& [a, b] : Align(p, q)) affinity += std::sqrt(a * b);
  return std::clamp(1.0 - affinity, 0.0, 1.0);
}

}  // namespace ldp_interact
