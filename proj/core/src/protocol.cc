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

#include "ldp_interact/protocol.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace ldp_interact {

std::string TranscriptKey(std::span<const RoundRecord> rounds) {
  std::string key;
  key.reserve(rounds.size() * 8);
  for (const RoundRecord& r : rounds) {
    absl::StrAppend(&key, r.user, ":", r.randomizer_id, ":", r.message, ";");
  }
  return key;
}

UserView ViewOf(std::span<const RoundRecord> rounds, int user) {
  UserView view;
  for (const RoundRecord& r : rounds) {
    if (r.user == user) view.emplace_back(r.randomizer_id, r.message);
  }
  return view;
}

absl::StatusOr<Protocol> Protocol::Create(
    std::string name, int n_declared, std::shared_ptr<const Registry> registry,
    StepFn step, double declared_eps) {
  if (n_declared < 0) {
    return absl::InvalidArgumentError("n_declared must be >= 0");
  }
  if (registry == nullptr || !step) {
    return absl::InvalidArgumentError("protocol needs a registry and a step");
  }
  Protocol p;
  p.name_ = std::move(name);
  p.n_declared_ = n_declared;
  p.registry_ = std::move(registry);
  p.step_ = std::move(step);
  p.declared_eps_ = declared_eps;
  p.minimal_eps_.reserve(p.registry_->size());
  for (const Randomizer& r : *p.registry_) {
    p.minimal_eps_.push_back(MinimalEps(r));
  }
  return p;
}

absl::StatusOr<std::optional<Assignment>> Protocol::Next(
    std::span<const RoundRecord> prefix) const {
  std::optional<Assignment> a = step_(prefix);
  if (!a.has_value()) return a;
  if (a->user < 0 || a->user >= n_declared_) {
    return absl::OutOfRangeError(absl::StrCat(
        name_, ": round ", prefix.size(), " selects user ", a->user,
        " outside [0, ", n_declared_, ")"));
  }
  if (a->randomizer_id < 0 ||
      static_cast<std::size_t>(a->randomizer_id) >= registry_->size()) {
    return absl::OutOfRangeError(absl::StrCat(
        name_, ": unknown randomizer id ", a->randomizer_id));
  }
  if (a->delta != 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat(name_, ": round ", prefix.size(),
                     " assigns delta > 0; only pure protocols are supported"));
  }
  const double needed = minimal_eps(a->randomizer_id);
  if (!(a->eps + kPrivacySlack >= needed)) {
    return absl::InvalidArgumentError(absl::StrCat(
        name_, ": round ", prefix.size(), " charges eps ", a->eps,
        " for a randomizer with minimal eps ", needed));
  }
  if (a->eps > declared_eps_ + kPrivacySlack) {
    return absl::InvalidArgumentError(absl::StrCat(
        name_, ": round ", prefix.size(), " charges eps ", a->eps,
        " above the protocol's declared eps ", declared_eps_));
  }
  return a;
}

ViewLikelihood::ViewLikelihood(const FiniteDist& prior)
    : prior_(&prior), values_(prior.size(), 1.0) {}

absl::Status ViewLikelihood::Update(const Randomizer& r, std::size_t y_index) {
  double top = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const std::ptrdiff_t xi = r.DomainIndex(prior_->support()[i]);
    if (xi < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("prior symbol ", prior_->support()[i],
                       " is outside the randomizer domain"));
    }
    values_[i] *= r.Prob(static_cast<std::size_t>(xi), y_index);
    top = std::max(top, values_[i]);
  }
  if (top == 0.0) {
    return absl::FailedPreconditionError(
        "view has zero likelihood for every datum");
  }
  for (double& v : values_) v /= top;
  return absl::OkStatus();
}

FiniteDist ViewLikelihood::Posterior() const {
  std::vector<double> w(values_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = prior_->probs()[i] * values_[i];
    total += w[i];
  }
  for (double& v : w) v /= total;
  return *FiniteDist::Create({prior_->support().begin(),
                              prior_->support().end()},
                             std::move(w));
}

absl::StatusOr<FiniteDist> Posterior(const FiniteDist& prior,
                                     const UserView& user_view,
                                     const Registry& registry) {
  std::vector<double> weight(prior.probs().begin(), prior.probs().end());
  for (const auto& [rid, message] : user_view) {
    if (rid < 0 || static_cast<std::size_t>(rid) >= registry.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown randomizer id ", rid));
    }
    const Randomizer& r = registry[static_cast<std::size_t>(rid)];
    const std::ptrdiff_t yi = r.RangeIndex(message);
    if (yi < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "message ", message, " is outside the range of randomizer ", rid));
    }
    for (std::size_t i = 0; i < prior.size(); ++i) {
      const std::ptrdiff_t xi = r.DomainIndex(prior.support()[i]);
      if (xi < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("prior symbol ", prior.support()[i],
                         " is outside the domain of randomizer ", rid));
      }
      weight[i] *= r.Prob(static_cast<std::size_t>(xi),
                          static_cast<std::size_t>(yi));
    }
  }
  double total = 0.0;
  for (double w : weight) total += w;
  if (!(total > 0.0)) {
    return absl::FailedPreconditionError(
        "user view has zero probability under the prior");
  }
  for (double& w : weight) w /= total;
  return FiniteDist::Create({prior.support().begin(), prior.support().end()},
                            std::move(weight));
}

namespace {

absl::StatusOr<std::size_t> DomainPosition(const Randomizer& r, Symbol x) {
  const std::ptrdiff_t xi = r.DomainIndex(x);
  if (xi < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "datum ", x, " is outside the domain of randomizer '", r.name(), "'"));
  }
  return static_cast<std::size_t>(xi);
}

absl::Status CheckUsers(const Protocol& p, int n) {
  if (n < p.n_declared()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "experiment has ", n, " users but the protocol declares ",
        p.n_declared()));
  }
  return absl::OkStatus();
}

absl::Status RunawayError(const Protocol& p, std::int64_t cap) {
  return absl::ResourceExhaustedError(absl::StrCat(
      p.name(), ": protocol did not halt within ", cap, " rounds"));
}

}  // namespace

absl::StatusOr<Transcript> FollowExpt(const Protocol& p,
                                      const FiniteDist& prior, int n,
                                      SeededRng& rng,
                                      const ExperimentOptions& options) {
  if (auto s = CheckUsers(p, n); !s.ok()) return s;
  std::vector<Symbol> data(static_cast<std::size_t>(n));
  for (Symbol& x : data) x = Sample(prior, rng);

  Transcript t;
  while (true) {
    absl::StatusOr<std::optional<Assignment>> next = p.Next(t.rounds);
    if (!next.ok()) return next.status();
    if (!next->has_value()) return t;
    if (static_cast<std::int64_t>(t.size()) >= options.max_rounds) {
      return RunawayError(p, options.max_rounds);
    }
    const Assignment& a = **next;
    const Randomizer& r = p.randomizer(a.randomizer_id);
    absl::StatusOr<std::size_t> xi =
        DomainPosition(r, data[static_cast<std::size_t>(a.user)]);
    if (!xi.ok()) return xi.status();
    const Symbol y = r.range()[r.SampleIndex(*xi, rng)];
    t.rounds.push_back({a.user, a.randomizer_id, a.eps, a.delta, y});
  }
}

absl::StatusOr<Transcript> BayesExpt(const Protocol& p,
                                     const FiniteDist& prior, int n,
                                     SeededRng& rng,
                                     const ExperimentOptions& options) {
  if (auto s = CheckUsers(p, n); !s.ok()) return s;
  std::vector<ViewLikelihood> views(static_cast<std::size_t>(n),
                                    ViewLikelihood(prior));
  std::vector<double> weight(prior.size());

  Transcript t;
  while (true) {
    absl::StatusOr<std::optional<Assignment>> next = p.Next(t.rounds);
    if (!next.ok()) return next.status();
    if (!next->has_value()) return t;
    if (static_cast<std::int64_t>(t.size()) >= options.max_rounds) {
      return RunawayError(p, options.max_rounds);
    }
    const Assignment& a = **next;
    const Randomizer& r = p.randomizer(a.randomizer_id);
    ViewLikelihood& view = views[static_cast<std::size_t>(a.user)];

    // x ~ Q_{i,t}: prior reweighted by the user's own likelihood.
    double total = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      weight[i] = prior.probs()[i] * view.values()[i];
      total += weight[i];
    }
    const double u = rng.Uniform() * total;
    std::size_t pick = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (weight[i] == 0.0) continue;
      acc += weight[i];
      pick = i;
      if (u < acc) break;
    }
    absl::StatusOr<std::size_t> xi = DomainPosition(r, prior.support()[pick]);
    if (!xi.ok()) return xi.status();
    const std::size_t yi = r.SampleIndex(*xi, rng);
    if (auto s = view.Update(r, yi); !s.ok()) return s;
    t.rounds.push_back({a.user, a.randomizer_id, a.eps, a.delta, r.range()[yi]});
  }
}

namespace {

// Depth-first walk of the reachable transcript tree for Classify.
class ClassifyWalker {
 public:
  ClassifyWalker(const Protocol& p, const FiniteDist& prior, int n,
                 const TreeOptions& options)
      : p_(p),
        prior_(prior),
        options_(options),
        views_(static_cast<std::size_t>(n), ViewLikelihood(prior)),
        sums_(static_cast<std::size_t>(n), 0.0),
        worst_sums_(static_cast<std::size_t>(n), 0.0),
        touched_(static_cast<std::size_t>(n), 0) {}

  absl::Status Walk() { return Visit(0.0, true); }

  const std::vector<double>& worst_sums() const { return worst_sums_; }
  double worst_total() const { return worst_total_; }
  bool sequential() const { return sequential_; }
  bool noninteractive() const { return noninteractive_; }
  std::int64_t leaves() const { return leaves_; }
  int max_depth() const { return max_depth_; }

 private:
  absl::Status Visit(double total, bool sequential_so_far) {
    const int depth = static_cast<int>(prefix_.size());
    if (depth > options_.max_depth) {
      return absl::ResourceExhaustedError(absl::StrCat(
          p_.name(), ": transcript depth exceeds ", options_.max_depth));
    }
    absl::StatusOr<std::optional<Assignment>> next = p_.Next(prefix_);
    if (!next.ok()) return next.status();

    // Noninteractive means the assignment at each depth, including halting,
    // is the same on every reachable branch.
    if (static_cast<std::size_t>(depth) >= schedule_.size()) {
      schedule_.push_back(*next);
    } else if (schedule_[static_cast<std::size_t>(depth)] != *next) {
      noninteractive_ = false;
    }

    if (!next->has_value()) {
      if (++leaves_ > options_.max_leaves) {
        return absl::ResourceExhaustedError(absl::StrCat(
            p_.name(), ": more than ", options_.max_leaves,
            " reachable transcripts"));
      }
      for (std::size_t i = 0; i < sums_.size(); ++i) {
        worst_sums_[i] = std::max(worst_sums_[i], sums_[i]);
      }
      worst_total_ = std::max(worst_total_, total);
      sequential_ = sequential_ && sequential_so_far;
      max_depth_ = std::max(max_depth_, depth);
      return absl::OkStatus();
    }

    const Assignment a = **next;
    const auto user = static_cast<std::size_t>(a.user);
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    const double cost = p_.minimal_eps(a.randomizer_id);
    const bool repeat = touched_[user] != 0;

    std::vector<std::size_t> xs(prior_.size());
    for (std::size_t i = 0; i < prior_.size(); ++i) {
      const std::ptrdiff_t xi = r.DomainIndex(prior_.support()[i]);
      if (xi < 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            p_.name(), ": prior symbol ", prior_.support()[i],
            " outside the domain of randomizer ", a.randomizer_id));
      }
      xs[i] = static_cast<std::size_t>(xi);
    }

    for (std::size_t y = 0; y < r.range_size(); ++y) {
      double mass = 0.0;
      for (std::size_t i = 0; i < prior_.size(); ++i) {
        mass += prior_.probs()[i] * views_[user].values()[i] * r.Prob(xs[i], y);
      }
      if (mass <= 0.0) continue;

      const ViewLikelihood saved = views_[user];
      if (auto s = views_[user].Update(r, y); !s.ok()) return s;
      sums_[user] += cost;
      ++touched_[user];
      prefix_.push_back({a.user, a.randomizer_id, a.eps, a.delta,
                         r.range()[y]});
      absl::Status s = Visit(total + cost, sequential_so_far && !repeat);
      prefix_.pop_back();
      --touched_[user];
      sums_[user] -= cost;
      views_[user] = saved;
      if (!s.ok()) return s;
    }
    return absl::OkStatus();
  }

  const Protocol& p_;
  const FiniteDist& prior_;
  TreeOptions options_;
  std::vector<RoundRecord> prefix_;
  std::vector<ViewLikelihood> views_;
  std::vector<double> sums_;
  std::vector<double> worst_sums_;
  std::vector<int> touched_;
  std::vector<std::optional<Assignment>> schedule_;
  double worst_total_ = 0.0;
  bool sequential_ = true;
  bool noninteractive_ = true;
  std::int64_t leaves_ = 0;
  int max_depth_ = 0;
};

}  // namespace

absl::StatusOr<CompositionReport> Classify(const Protocol& p,
                                           const FiniteDist& prior, int n,
                                           double overall_eps,
                                           const TreeOptions& options) {
  if (auto s = CheckUsers(p, n); !s.ok()) return s;
  if (!(overall_eps >= 0.0)) {
    return absl::InvalidArgumentError("overall eps must be >= 0");
  }
  ClassifyWalker walker(p, prior, n, options);
  if (auto s = walker.Walk(); !s.ok()) return s;

  CompositionReport report;
  report.per_user_eps_sum = walker.worst_sums();
  report.overall_eps = overall_eps;
  const double worst_user =
      report.per_user_eps_sum.empty()
          ? 0.0
          : *std::max_element(report.per_user_eps_sum.begin(),
                              report.per_user_eps_sum.end());
  const double inf = std::numeric_limits<double>::infinity();
  if (overall_eps > 0.0) {
    report.k_worst = worst_user / overall_eps;
    report.k_average = n > 0 ? walker.worst_total() / (overall_eps * n) : 0.0;
  } else {
    report.k_worst = worst_user > 0.0 ? inf : 0.0;
    report.k_average = walker.worst_total() > 0.0 ? inf : 0.0;
  }
  report.is_sequential = walker.sequential();
  report.is_noninteractive = walker.noninteractive();
  report.leaves = walker.leaves();
  report.max_rounds = walker.max_depth();
  return report;
}

}  // namespace ldp_interact
