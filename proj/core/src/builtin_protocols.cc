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

#include "ldp_interact/builtin_protocols.h"

#include <cmath>
#include <memory>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "status_macros.h"

namespace ldp_interact {
namespace {

std::vector<Symbol> Iota(int k) {
  std::vector<Symbol> v(static_cast<std::size_t>(k));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Binary randomized response on the predicate "x is in `ones`".
absl::StatusOr<Randomizer> PredicateRr(int k, std::vector<int> ones,
                                       double eps, std::string name) {
  const double high = std::exp(eps) / (std::exp(eps) + 1.0);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k),
                                        {high, 1.0 - high});
  for (int x : ones) rows[static_cast<std::size_t>(x)] = {1.0 - high, high};
  return Randomizer::Create(Iota(k), {0, 1}, std::move(rows), eps, 0.0,
                            std::move(name));
}

// Assignment helper charging the randomizer's minimal eps.
struct Charger {
  std::vector<double> cost;
  Assignment operator()(int user, int rid) const {
    return {user, rid, cost[static_cast<std::size_t>(rid)], 0.0};
  }
};

Charger MakeCharger(const Registry& registry) {
  Charger c;
  for (const Randomizer& r : registry) c.cost.push_back(MinimalEps(r));
  return c;
}

absl::StatusOr<ProtocolInstance> Finish(std::string name, int n,
                                        Registry registry, StepFn step,
                                        double eps, FiniteDist prior) {
  auto shared = std::make_shared<const Registry>(std::move(registry));
  absl::StatusOr<Protocol> p =
      Protocol::Create(std::move(name), n, shared, std::move(step), eps);
  if (!p.ok()) return p.status();
  return ProtocolInstance{*std::move(p), std::move(prior), n};
}

// One user, two rounds of RR(eps/2) on the same bit.
absl::StatusOr<ProtocolInstance> RepeatRr(double eps) {
  LDPI_ASSIGN_OR_RETURN(auto rr, MakeRandomizedResponse(2, eps / 2));
  Registry reg{rr};
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    if (t.size() >= 2) return std::nullopt;
    return c(0, 0);
  };
  return Finish("repeat_rr", 1, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.7, 0.3}));
}

// Whether user 0 is queried again depends on its first answer.
absl::StatusOr<ProtocolInstance> AdaptiveRequery(double eps) {
  LDPI_ASSIGN_OR_RETURN(auto half, MakeRandomizedResponse(2, eps / 2));
  LDPI_ASSIGN_OR_RETURN(auto full, MakeRandomizedResponse(2, eps));
  Registry reg{half, full};
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    switch (t.size()) {
      case 0:
        return c(0, 0);
      case 1:
        return t[0].message == 1 ? c(0, 0) : c(1, 0);
      case 2:
        return t[0].message == 1 ? c(1, 1) : c(1, 0);
      default:
        return std::nullopt;
    }
  };
  return Finish("adaptive_requery", 2, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.6, 0.4}));
}

// Histogram structure on three symbols with a single user.
absl::StatusOr<ProtocolInstance> Histogram3(double eps) {
  Registry reg;
  for (int j = 0; j < 3; ++j) {
    LDPI_ASSIGN_OR_RETURN(auto round, MakeHistogramRound(3, j, eps));
    reg.push_back(std::move(round));
  }
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    if (t.size() >= 3) return std::nullopt;
    return c(0, static_cast<int>(t.size()));
  };
  return Finish("histogram3", 1, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.5, 0.3, 0.2}));
}

// Both users answer "x >= 1"; the order of the follow-up "x == 2" questions
// depends on whether they agreed.
absl::StatusOr<ProtocolInstance> TernaryThreshold(double eps) {
  LDPI_ASSIGN_OR_RETURN(auto above, PredicateRr(3, {1, 2}, eps / 2, "x>=1"));
  LDPI_ASSIGN_OR_RETURN(auto top, PredicateRr(3, {2}, eps / 2, "x==2"));
  Registry reg{above, top};
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    switch (t.size()) {
      case 0:
        return c(0, 0);
      case 1:
        return c(1, 0);
      case 2:
        return c(t[0].message != t[1].message ? 0 : 1, 1);
      case 3:
        return c(t[2].user == 0 ? 1 : 0, 1);
      default:
        return std::nullopt;
    }
  };
  return Finish("ternary_threshold", 2, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.3, 0.3, 0.4}));
}

// Three users; a third user is recruited only on negative answers.
absl::StatusOr<ProtocolInstance> ThreeUsers(double eps) {
  LDPI_ASSIGN_OR_RETURN(auto half, MakeRandomizedResponse(2, eps / 2));
  LDPI_ASSIGN_OR_RETURN(auto full, MakeRandomizedResponse(2, eps));
  LDPI_ASSIGN_OR_RETURN(auto coin, MakeBernoulli(0.5, 2));
  Registry reg{half, full, coin};
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    switch (t.size()) {
      case 0:
        return c(0, 0);
      case 1:
        return c(1, 0);
      case 2:
        return t[0].message == 1 ? c(0, 0) : c(2, 1);
      case 3:
        if (t[1].message == 1) return c(1, 0);
        return t[2].user == 2 ? c(2, 2) : c(2, 1);
      default:
        return std::nullopt;
    }
  };
  return Finish("three_users", 3, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.45, 0.55}));
}

// A public coin (zero-cost data-independent round) picks the schedule.
absl::StatusOr<ProtocolInstance> CoinSchedule(double eps) {
  LDPI_ASSIGN_OR_RETURN(auto coin, MakeBernoulli(0.5, 3));
  LDPI_ASSIGN_OR_RETURN(auto full, PredicateRr(3, {0}, eps, "x==0"));
  LDPI_ASSIGN_OR_RETURN(auto half, PredicateRr(3, {0}, eps / 2, "x==0/2"));
  Registry reg{coin, full, half};
  Charger c = MakeCharger(reg);
  StepFn step = [c](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    if (t.empty()) return c(0, 0);
    const bool heads = t[0].message == 1;
    switch (t.size()) {
      case 1:
        return heads ? c(1, 2) : c(0, 1);
      case 2:
        return heads ? c(1, 2) : c(1, 1);
      case 3:
        if (heads) return c(0, 1);
        return std::nullopt;
      default:
        return std::nullopt;
    }
  };
  return Finish("coin_schedule", 2, std::move(reg), std::move(step), eps,
                *FiniteDist::FromProbs({0.25, 0.35, 0.4}));
}

}  // namespace

absl::StatusOr<Randomizer> MakeHistogramRound(int d, int hot, double eps) {
  if (d < 1 || hot < 0 || hot >= d) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram round ", hot, " outside [0, ", d, ")"));
  }
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError("histogram round needs eps > 0");
  }
  const double high = std::exp(eps) / (std::exp(eps) + 1.0);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d),
                                        {0.5, 0.5});
  rows[static_cast<std::size_t>(hot)] = {1.0 - high, high};
  return Randomizer::Create(Iota(d), {0, 1}, std::move(rows), eps, 0.0,
                            absl::StrCat("hist", d, "[", hot, "]"));
}

absl::StatusOr<ProtocolInstance> HistogramProtocol(int d, double eps, int n) {
  if (d < 1 || n < 1) {
    return absl::InvalidArgumentError("histogram protocol needs d, n >= 1");
  }
  Registry reg;
  for (int j = 0; j < d; ++j) {
    LDPI_ASSIGN_OR_RETURN(auto round, MakeHistogramRound(d, j, eps));
    reg.push_back(std::move(round));
  }
  Charger c = MakeCharger(reg);
  const std::size_t total = static_cast<std::size_t>(d) * n;
  StepFn step = [c, n, total](
                    std::span<const RoundRecord> t) -> std::optional<Assignment> {
    if (t.size() >= total) return std::nullopt;
    const int round = static_cast<int>(t.size()) / n;
    const int user = static_cast<int>(t.size()) % n;
    return c(user, round);
  };
  return Finish(absl::StrCat("histogram(d=", d, ")"), n,
                std::move(reg), std::move(step), eps,
                FiniteDist::Uniform(static_cast<std::size_t>(d)));
}

absl::StatusOr<ProtocolInstance> SimpleHypotestProtocol(const FiniteDist& p0,
                                                        const FiniteDist& p1,
                                                        double eps, int n) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  std::vector<Symbol> domain(p0.support().begin(), p0.support().end());
  for (Symbol s : p1.support()) {
    if (!p0.Contains(s)) domain.push_back(s);
  }
  LDPI_ASSIGN_OR_RETURN(auto rr, MakeRandomizedResponse(2, eps));
  std::vector<std::vector<double>> rows;
  for (Symbol x : domain) {
    const std::size_t bit = p1.Prob(x) > p0.Prob(x) ? 1 : 0;
    auto row = rr.Row(bit);
    rows.emplace_back(row.begin(), row.end());
  }
  LDPI_ASSIGN_OR_RETURN(
      auto vote, Randomizer::Create(domain, {0, 1}, std::move(rows), eps, 0.0,
                               "likelihood_vote"));
  Registry reg{vote};
  Charger c = MakeCharger(reg);
  StepFn step = [c, n](std::span<const RoundRecord> t) -> std::optional<Assignment> {
    if (t.size() >= static_cast<std::size_t>(n)) return std::nullopt;
    return c(static_cast<int>(t.size()), 0);
  };
  return Finish("simple_hypotest", n, std::move(reg), std::move(step), eps, p0);
}

std::vector<std::string> CorpusNames() {
  return {"repeat_rr",   "adaptive_requery", "histogram3",
          "ternary_threshold", "three_users", "coin_schedule"};
}

absl::StatusOr<ProtocolInstance> CorpusProtocol(const std::string& name,
                                                double eps) {
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError("corpus protocols need eps > 0");
  }
  if (name == "repeat_rr") return RepeatRr(eps);
  if (name == "adaptive_requery") return AdaptiveRequery(eps);
  if (name == "histogram3") return Histogram3(eps);
  if (name == "ternary_threshold") return TernaryThreshold(eps);
  if (name == "three_users") return ThreeUsers(eps);
  if (name == "coin_schedule") return CoinSchedule(eps);
  return absl::NotFoundError(absl::StrCat("no corpus protocol '", name, "'"));
}

absl::StatusOr<std::vector<ProtocolInstance>> VerificationCorpus(double eps) {
  std::vector<ProtocolInstance> out;
  for (const std::string& name : CorpusNames()) {
    absl::StatusOr<ProtocolInstance> p = CorpusProtocol(name, eps);
    if (!p.ok()) return p.status();
    out.push_back(*std::move(p));
  }
  return out;
}

}  // namespace ldp_interact
