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

#include "ldp_interact/randomizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldp_interact {
namespace {

bool IsDense(const std::vector<Symbol>& symbols) {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] != static_cast<Symbol>(i)) return false;
  }
  return true;
}

absl::Status CheckDistinct(const std::vector<Symbol>& symbols,
                           const char* what) {
  std::unordered_set<Symbol> seen;
  for (Symbol s : symbols) {
    if (!seen.insert(s).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate ", what, " symbol ", s));
    }
  }
  return absl::OkStatus();
}

std::vector<Symbol> Iota(int k) {
  std::vector<Symbol> v(static_cast<std::size_t>(k));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

absl::StatusOr<Randomizer> Randomizer::Create(
    std::vector<Symbol> domain, std::vector<Symbol> range,
    std::vector<std::vector<double>> rows, double declared_eps,
    double declared_delta, std::string name) {
  if (domain.empty() || range.empty()) {
    return absl::InvalidArgumentError("randomizer domain and range must be "
                                      "non-empty");
  }
  if (auto s = CheckDistinct(domain, "domain"); !s.ok()) return s;
  if (auto s = CheckDistinct(range, "range"); !s.ok()) return s;
  if (rows.size() != domain.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", domain.size(), " rows, got ", rows.size()));
  }
  if (!(declared_eps >= 0.0) || std::isnan(declared_eps)) {
    return absl::InvalidArgumentError("declared eps must be >= 0");
  }
  if (!(declared_delta >= 0.0 && declared_delta <= 1.0)) {
    return absl::InvalidArgumentError("declared delta must lie in [0, 1]");
  }
  Randomizer r;
  r.table_.reserve(domain.size() * range.size());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const auto& row = rows[x];
    if (row.size() != range.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", x, " has ", row.size(), " entries, range has ",
          range.size()));
    }
    double total = 0.0;
    for (double p : row) {
      if (!std::isfinite(p) || p < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", x, " has invalid probability ", p));
      }
      total += p;
    }
    if (std::fabs(total - 1.0) > kNormalizationSlack) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", x, " sums to ", total));
    }
    for (double p : row) r.table_.push_back(p / total);
  }
  r.dense_domain_ = IsDense(domain);
  r.dense_range_ = IsDense(range);
  r.domain_ = std::move(domain);
  r.range_ = std::move(range);
  r.declared_eps_ = declared_eps;
  r.declared_delta_ = declared_delta;
  r.name_ = std::move(name);
  if (!SatisfiesDp(r, declared_eps, declared_delta)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "table is not (", declared_eps, ", ", declared_delta,
        ")-differentially private; minimal eps is ", MinimalEps(r)));
  }
  return r;
}

FiniteDist Randomizer::RowDist(std::size_t x_index) const {
  auto row = Row(x_index);
  return *FiniteDist::Create(range_, {row.begin(), row.end()});
}

std::ptrdiff_t Randomizer::DomainIndex(Symbol x) const {
  if (dense_domain_) {
    return (x >= 0 && static_cast<std::size_t>(x) < domain_.size()) ? x : -1;
  }
  auto it = std::find(domain_.begin(), domain_.end(), x);
  return it == domain_.end() ? -1 : it - domain_.begin();
}

std::ptrdiff_t Randomizer::RangeIndex(Symbol y) const {
  if (dense_range_) {
    return (y >= 0 && static_cast<std::size_t>(y) < range_.size()) ? y : -1;
  }
  auto it = std::find(range_.begin(), range_.end(), y);
  return it == range_.end() ? -1 : it - range_.begin();
}

std::size_t Randomizer::SampleIndex(std::size_t x_index,
                                    SeededRng& rng) const {
  auto row = Row(x_index);
  const double u = rng.Uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] == 0.0) continue;
    acc += row[y];
    last_positive = y;
    if (u < acc) return y;
  }
  return last_positive;
}

absl::StatusOr<Randomizer> MakeRandomizedResponse(int k, double eps) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("randomized response needs k >= 2, got ", k));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("randomized response needs eps > 0, got ", eps));
  }
  const double denom = std::exp(eps) + (k - 1);
  const double truth = std::exp(eps) / denom;
  const double lie = 1.0 / denom;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k),
                                        std::vector<double>(k, lie));
  for (int x = 0; x < k; ++x) rows[x][x] = truth;
  return Randomizer::Create(Iota(k), Iota(k), std::move(rows), eps, 0.0,
                            absl::StrCat("rr(", k, ",", eps, ")"));
}

absl::StatusOr<Randomizer> MakeBernoulli(double p, int domain_size) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli parameter ", p, " outside [0, 1]"));
  }
  if (domain_size < 1) {
    return absl::InvalidArgumentError("Bernoulli domain must be non-empty");
  }
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(domain_size), std::vector<double>{1.0 - p, p});
  return Randomizer::Create(Iota(domain_size), Iota(2), std::move(rows), 0.0,
                            0.0, absl::StrCat("ber(", p, ")"));
}

double MinimalEps(const Randomizer& r) {
  double worst = 0.0;
  for (std::size_t y = 0; y < r.range_size(); ++y) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < r.domain_size(); ++x) {
      hi = std::max(hi, r.Prob(x, y));
      lo = std::min(lo, r.Prob(x, y));
    }
    if (hi == 0.0) continue;
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::log(hi / lo));
  }
  return worst;
}

bool SatisfiesDp(const Randomizer& r, double eps, double delta) {
  if (delta == 0.0) return MinimalEps(r) <= eps + kPrivacySlack;
  const double bound = std::exp(eps);
  for (std::size_t y = 0; y < r.range_size(); ++y) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < r.domain_size(); ++x) {
      hi = std::max(hi, r.Prob(x, y));
      lo = std::min(lo, r.Prob(x, y));
    }
    if (hi > bound * lo + delta + kPrivacySlack) return false;
  }
  return true;
}

absl::StatusOr<Symbol> Apply(const Randomizer& r, Symbol x, SeededRng& rng) {
  const std::ptrdiff_t xi = r.DomainIndex(x);
  if (xi < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("symbol ", x, " is not in the randomizer domain"));
  }
  return r.range()[r.SampleIndex(static_cast<std::size_t>(xi), rng)];
}

absl::StatusOr<Decomposition> Decompose(const Randomizer& r, double eps,
                                        Symbol anchor_x0) {
  if (r.declared_delta() > 0.0) {
    return absl::InvalidArgumentError(
        "decomposition requires a pure (delta = 0) randomizer");
  }
  const std::ptrdiff_t anchor = r.DomainIndex(anchor_x0);
  if (anchor < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("anchor ", anchor_x0, " is not in the domain"));
  }
  const double eps_prime = MinimalEps(r);
  if (!std::isfinite(eps_prime)) {
    return absl::InvalidArgumentError(
        "randomizer has unbounded privacy loss; cannot decompose");
  }
  if (!(eps >= eps_prime - 1e-12)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target eps ", eps, " is below the randomizer's minimal eps ",
        eps_prime));
  }
  eps = std::max(eps, eps_prime);

  auto anchor_row = r.Row(static_cast<std::size_t>(anchor));
  std::vector<double> mu_probs(anchor_row.begin(), anchor_row.end());
  absl::StatusOr<FiniteDist> mu =
      FiniteDist::Create({r.range().begin(), r.range().end()}, mu_probs);
  if (!mu.ok()) return mu.status();

  Decomposition d;
  d.eps_prime = eps_prime;
  d.eps = eps;
  d.anchor_x0 = anchor_x0;
  d.mu = *std::move(mu);

  std::vector<std::vector<double>> rows;
  rows.reserve(r.domain_size());
  if (eps_prime == 0.0) {
    d.gamma = 0.0;
    d.degenerate = true;
    rows.assign(r.domain_size(), mu_probs);
  } else {
    d.gamma = std::expm1(-eps_prime) / std::expm1(-eps);
    for (std::size_t x = 0; x < r.domain_size(); ++x) {
      std::vector<double> row(r.range_size());
      for (std::size_t y = 0; y < r.range_size(); ++y) {
        const double base = mu_probs[y];
        double v = base + (r.Prob(x, y) - base) / d.gamma;
        // Rounding can leave -1e-17 where the exact value is 0.
        if (v < 0.0 && v > -1e-12) v = 0.0;
        row[y] = v;
      }
      rows.push_back(std::move(row));
    }
  }
  absl::StatusOr<Randomizer> tilde = Randomizer::Create(
      {r.domain().begin(), r.domain().end()},
      {r.range().begin(), r.range().end()}, std::move(rows), 2.0 * eps, 0.0,
      r.name().empty() ? "" : absl::StrCat(r.name(), "~"));
  if (!tilde.ok()) return tilde.status();
  d.r_tilde = *std::move(tilde);
  return d;
}

absl::StatusOr<Decomposition> Decompose(const Randomizer& r, double eps) {
  if (r.domain_size() == 0) {
    return absl::InvalidArgumentError("empty randomizer");
  }
  return Decompose(r, eps, r.domain()[0]);
}

double MixtureProb(const Decomposition& d, std::size_t x_index,
                   std::size_t y_index) {
  return d.gamma * d.r_tilde.Prob(x_index, y_index) +
         (1.0 - d.gamma) * d.mu.probs()[y_index];
}

}  // namespace ldp_interact
