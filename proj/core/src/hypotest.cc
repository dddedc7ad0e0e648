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

#include "ldp_interact/hypotest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ldp_interact/lp.h"
#include "ldp_interact/trials.h"
#include "status_macros.h"

namespace ldp_interact {
namespace {

absl::Status CheckEps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("eps must be positive and finite");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> SuccessFraction(
    const std::vector<absl::StatusOr<bool>>& outcomes) {
  double wins = 0.0;
  for (const auto& o : outcomes) {
    if (!o.ok()) return o.status();
    wins += *o ? 1.0 : 0.0;
  }
  return wins / static_cast<double>(outcomes.size());
}

std::size_t GroundIndex(const CompoundInstance& inst, Symbol x) {
  return static_cast<std::size_t>(
      std::find(inst.ground_set.begin(), inst.ground_set.end(), x) -
      inst.ground_set.begin());
}

}  // namespace

absl::StatusOr<SimpleTestInstance> SimpleTestInstance::Create(FiniteDist p0,
                                                              FiniteDist p1) {
  const double alpha = TvDistance(p0, p1);
  if (!(alpha > 0.0)) {
    return absl::InvalidArgumentError("hypotheses must differ");
  }
  return SimpleTestInstance{std::move(p0), std::move(p1), alpha};
}

double Debias(double n_hat, std::int64_t n, double eps) {
  const double e = std::exp(eps);
  return (e + 1.0) / (e - 1.0) * (n_hat - static_cast<double>(n) / (e + 1.0));
}

int LikelihoodBit(const SimpleTestInstance& inst, Symbol x) {
  return inst.p1.Prob(x) > inst.p0.Prob(x) ? 1 : 0;
}

absl::StatusOr<int> SimpleTest(const SimpleTestInstance& inst, double eps,
                               std::int64_t n, int truth, SeededRng& rng) {
  LDPI_RETURN_IF_ERROR(CheckEps(eps));
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (truth != 0 && truth != 1) {
    return absl::InvalidArgumentError("truth must be 0 or 1");
  }
  const FiniteDist& source = truth == 0 ? inst.p0 : inst.p1;
  const double keep = std::exp(eps) / (std::exp(eps) + 1.0);
  std::int64_t ones = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int bit = LikelihoodBit(inst, Sample(source, rng));
    ones += rng.Bernoulli(keep) ? bit : 1 - bit;
  }
  const double n1 = Debias(static_cast<double>(ones), n, eps);
  const double n0 = Debias(static_cast<double>(n - ones), n, eps);
  return n1 > n0 ? 1 : 0;
}

absl::StatusOr<double> SimpleTestSuccessRate(const SimpleTestInstance& inst,
                                             double eps, std::int64_t n,
                                             std::int64_t trials,
                                             std::uint64_t seed, int threads) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  auto outcomes = RunTrials(
      trials, seed, threads,
      [&](std::int64_t t, SeededRng& rng) -> absl::StatusOr<bool> {
        const int truth = static_cast<int>(t % 2);
        LDPI_ASSIGN_OR_RETURN(int decision, SimpleTest(inst, eps, n, truth, rng));
        return decision == truth;
      });
  return SuccessFraction(outcomes);
}

absl::StatusOr<CompoundInstance> CompoundInstance::Create(
    std::vector<Symbol> ground_set, std::vector<FiniteDist> h0,
    std::vector<FiniteDist> h1) {
  if (ground_set.empty()) return absl::InvalidArgumentError("empty ground set");
  if (h0.empty() || h1.empty()) {
    return absl::InvalidArgumentError("hypothesis hulls need >= 1 vertex");
  }
  std::vector<Symbol> sorted = ground_set;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return absl::InvalidArgumentError("ground set has duplicates");
  }
  for (const auto* hull : {&h0, &h1}) {
    for (const FiniteDist& v : *hull) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v.probs()[i] > 0.0 &&
            !std::binary_search(sorted.begin(), sorted.end(), v.support()[i])) {
          return absl::InvalidArgumentError(absl::StrCat(
              "vertex puts mass on ", v.support()[i], " outside the ground set"));
        }
      }
    }
  }
  return CompoundInstance{std::move(ground_set), std::move(h0), std::move(h1),
                          0.0};
}

absl::StatusOr<EventDistribution> SolveEventGame(const CompoundInstance& inst,
                                                 double tol) {
  const std::size_t k = inst.ground_set.size();
  if (k > static_cast<std::size_t>(kMaxEventGroundSet)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ground set of ", k, " symbols exceeds ", kMaxEventGroundSet));
  }
  if (k == 0 || inst.h0.empty() || inst.h1.empty()) {
    return absl::InvalidArgumentError("empty ground set or hull");
  }
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");

  std::vector<std::vector<double>> diffs;
  for (const FiniteDist& p : inst.h0) {
    for (const FiniteDist& q : inst.h1) {
      std::vector<double> d(k);
      for (std::size_t x = 0; x < k; ++x) {
        d[x] = p.Prob(inst.ground_set[x]) - q.Prob(inst.ground_set[x]);
      }
      diffs.push_back(std::move(d));
    }
  }

  // Variables (w, s_1..s_k) with w = value + 1 >= 0:
  //   w - <s, P_a - Q_b> <= 1 for every pair,  s_x <= 1.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& d : diffs) {
    std::vector<double> row(k + 1);
    row[0] = 1.0;
    for (std::size_t x = 0; x < k; ++x) row[x + 1] = -d[x];
    a.push_back(std::move(row));
    b.push_back(1.0);
  }
  for (std::size_t x = 0; x < k; ++x) {
    std::vector<double> row(k + 1, 0.0);
    row[x + 1] = 1.0;
    a.push_back(std::move(row));
    b.push_back(1.0);
  }
  std::vector<double> c(k + 1, 0.0);
  c[0] = 1.0;
  LDPI_ASSIGN_OR_RETURN(LpSolution sol, MaximizeLp(a, b, c));

  EventDistribution out;
  out.scores.resize(k);
  for (std::size_t x = 0; x < k; ++x) {
    out.scores[x] = std::clamp(sol.x[x + 1], 0.0, 1.0);
  }
  out.value = std::numeric_limits<double>::infinity();
  for (const auto& d : diffs) {
    double v = 0.0;
    for (std::size_t x = 0; x < k; ++x) v += out.scores[x] * d[x];
    out.value = std::min(out.value, v);
  }
  double lambda_sum = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) lambda_sum += sol.duals[i];
  std::vector<double> mixed(k, 0.0);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const double l = lambda_sum > 0.0 ? sol.duals[i] / lambda_sum
                                      : 1.0 / static_cast<double>(diffs.size());
    for (std::size_t x = 0; x < k; ++x) mixed[x] += l * diffs[i][x];
  }
  for (double m : mixed) out.upper_bound += std::max(0.0, m);
  if (out.upper_bound - out.value > tol) {
    return absl::InternalError(absl::StrCat(
        "event game duality gap ", out.upper_bound - out.value,
        " exceeds tol ", tol));
  }
  if (out.value <= tol) {
    return absl::FailedPreconditionError(absl::StrCat(
        "hypotheses are not separated: game value ", out.value));
  }

  // Layer cake: E_j = {x : s_x >= t_j} with weight t_j - t_{j+1}.
  std::vector<double> levels;
  for (double s : out.scores) {
    if (s > 0.0) levels.push_back(s);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double top = levels.empty() ? 0.0 : levels.front();
  if (top < 1.0) {
    out.events.emplace_back();
    out.weights.push_back(1.0 - top);
  }
  for (std::size_t j = 0; j < levels.size(); ++j) {
    std::vector<Symbol> event;
    for (std::size_t x = 0; x < k; ++x) {
      if (out.scores[x] >= levels[j]) event.push_back(inst.ground_set[x]);
    }
    out.events.push_back(std::move(event));
    out.weights.push_back(levels[j] -
                          (j + 1 < levels.size() ? levels[j + 1] : 0.0));
  }
  return out;
}

double ExpectedScore(const CompoundInstance& inst, const EventDistribution& s,
                     const FiniteDist& dist) {
  double e = 0.0;
  for (std::size_t x = 0; x < inst.ground_set.size(); ++x) {
    e += dist.Prob(inst.ground_set[x]) * s.scores[x];
  }
  return e;
}

double CompoundThreshold(const CompoundInstance& inst,
                         const EventDistribution& s) {
  double low0 = std::numeric_limits<double>::infinity();
  double high1 = -std::numeric_limits<double>::infinity();
  for (const FiniteDist& p : inst.h0) low0 = std::min(low0, ExpectedScore(inst, s, p));
  for (const FiniteDist& q : inst.h1) high1 = std::max(high1, ExpectedScore(inst, s, q));
  return 0.5 * (low0 + high1);
}

absl::StatusOr<int> CompoundTest(const CompoundInstance& inst,
                                 const EventDistribution& s, double eps,
                                 std::int64_t n, const FiniteDist& true_dist,
                                 SeededRng& rng) {
  LDPI_RETURN_IF_ERROR(CheckEps(eps));
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (s.scores.size() != inst.ground_set.size()) {
    return absl::InvalidArgumentError("event distribution does not match");
  }
  std::vector<double> score_of(true_dist.size());
  for (std::size_t i = 0; i < true_dist.size(); ++i) {
    const std::size_t x = GroundIndex(inst, true_dist.support()[i]);
    if (x == inst.ground_set.size()) {
      if (true_dist.probs()[i] > 0.0) {
        return absl::InvalidArgumentError("true distribution leaves the ground set");
      }
      continue;
    }
    score_of[i] = s.scores[x];
  }
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sum += score_of[true_dist.SampleIndex(rng)] + rng.Laplace(1.0 / eps);
  }
  return sum / static_cast<double>(n) >= CompoundThreshold(inst, s) ? 0 : 1;
}

absl::StatusOr<double> CompoundTestSuccessRate(const CompoundInstance& inst,
                                               const EventDistribution& s,
                                               double eps, std::int64_t n,
                                               std::int64_t trials,
                                               std::uint64_t seed,
                                               int threads) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  auto outcomes = RunTrials(
      trials, seed, threads,
      [&](std::int64_t t, SeededRng& rng) -> absl::StatusOr<bool> {
        const int truth = static_cast<int>(t % 2);
        const auto& hull = truth == 0 ? inst.h0 : inst.h1;
        const FiniteDist& dist =
            hull[static_cast<std::size_t>(t / 2) % hull.size()];
        LDPI_ASSIGN_OR_RETURN(int decision,
                              CompoundTest(inst, s, eps, n, dist, rng));
        return decision == truth;
      });
  return SuccessFraction(outcomes);
}

std::int64_t ScaledSampleSize(double c, double eps, double alpha) {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(c / (eps * eps * alpha * alpha))));
}

absl::StatusOr<Calibration> CalibrateSampleConstant(
    double eps, double alpha,
    const std::function<absl::StatusOr<double>(std::int64_t)>& success_at,
    const std::vector<double>& constants, double target) {
  LDPI_RETURN_IF_ERROR(CheckEps(eps));
  if (!(alpha > 0.0)) return absl::InvalidArgumentError("alpha must be > 0");
  Calibration cal;
  for (double c : constants) {
    const std::int64_t n = ScaledSampleSize(c, eps, alpha);
    LDPI_ASSIGN_OR_RETURN(double rate, success_at(n));
    cal.c = c;
    cal.n = n;
    cal.success = rate;
    if (rate >= target) {
      cal.found = true;
      break;
    }
  }
  if (!cal.found) return cal;
  cal.n_quarter = std::max<std::int64_t>(1, cal.n / 4);
  LDPI_ASSIGN_OR_RETURN(cal.success_quarter, success_at(cal.n_quarter));
  return cal;
}

}  // namespace ldp_interact
