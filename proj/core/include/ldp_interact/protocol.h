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

#ifndef LDP_INTERACT_PROTOCOL_H_
#define LDP_INTERACT_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/randomizer.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

// What a protocol asks for in one round: which user applies which registry
// randomizer, charged at (eps, delta).
struct Assignment {
  int user = 0;
  int randomizer_id = 0;
  double eps = 0.0;
  double delta = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// One published round (i^t, R_t, eps_t, delta_t, y_t).
struct RoundRecord {
  int user = 0;
  int randomizer_id = 0;
  double eps = 0.0;
  double delta = 0.0;
  Symbol message = 0;
};

// Append-only list of rounds.
struct Transcript {
  std::vector<RoundRecord> rounds;

  std::size_t size() const { return rounds.size(); }
  bool empty() const { return rounds.empty(); }
};

// Canonical key "user:randomizer:message;" per round. eps/delta are omitted:
// they are a deterministic function of the prefix.
std::string TranscriptKey(std::span<const RoundRecord> rounds);
inline std::string TranscriptKey(const Transcript& t) {
  return TranscriptKey(t.rounds);
}

// (randomizer id, message) pairs of the rounds that queried one user.
using UserView = std::vector<std::pair<int, Symbol>>;
UserView ViewOf(std::span<const RoundRecord> rounds, int user);

using Registry = std::vector<Randomizer>;

// Next assignment for a transcript prefix, or nullopt to halt. Must be a
// pure function of the prefix.
using StepFn =
    std::function<std::optional<Assignment>(std::span<const RoundRecord>)>;

// A deterministic interactive protocol over a fixed randomizer registry.
class Protocol {
 public:
  static constexpr double kNoDeclaredEps =
      std::numeric_limits<double>::infinity();

  // `declared_eps` caps every round's eps_t when finite.
  static absl::StatusOr<Protocol> Create(
      std::string name, int n_declared,
      std::shared_ptr<const Registry> registry, StepFn step,
      double declared_eps = kNoDeclaredEps);

  // Validated step. Rejects users outside [0, n_declared), unknown
  // randomizers, delta_t != 0, eps_t below the randomizer's minimal eps, and
  // eps_t above the declared protocol eps.
  absl::StatusOr<std::optional<Assignment>> Next(
      std::span<const RoundRecord> prefix) const;

  const std::string& name() const { return name_; }
  int n_declared() const { return n_declared_; }
  double declared_eps() const { return declared_eps_; }
  const Registry& registry() const { return *registry_; }
  std::shared_ptr<const Registry> shared_registry() const { return registry_; }
  const Randomizer& randomizer(int id) const {
    return (*registry_)[static_cast<std::size_t>(id)];
  }
  // Cached MinimalEps of registry entry `id`.
  double minimal_eps(int id) const {
    return minimal_eps_[static_cast<std::size_t>(id)];
  }

 private:
  Protocol() = default;

  std::string name_;
  int n_declared_ = 0;
  std::shared_ptr<const Registry> registry_;
  StepFn step_;
  double declared_eps_ = kNoDeclaredEps;
  std::vector<double> minimal_eps_;
};

// Per-user likelihood of the user's own rounds, indexed by the prior's
// support and rescaled so the maximum is 1. Ratios are exact up to rounding.
class ViewLikelihood {
 public:
  explicit ViewLikelihood(const FiniteDist& prior);

  // Multiplies in P[r(x) = y] for the range position `y_index`.
  // InvalidArgument when a prior symbol is outside r's domain;
  // FailedPrecondition when every likelihood becomes zero.
  absl::Status Update(const Randomizer& r, std::size_t y_index);

  std::span<const double> values() const { return values_; }
  const FiniteDist& prior() const { return *prior_; }

  // prior(x) * L(x), renormalized.
  FiniteDist Posterior() const;

 private:
  const FiniteDist* prior_;
  std::vector<double> values_;
};

// Distribution proportional to prior(x) * prod_t row_x(y_t) over the user's
// own rounds. FailedPrecondition when the view has zero probability under
// the prior; InvalidArgument on unknown ids, messages or domain mismatch.
absl::StatusOr<FiniteDist> Posterior(const FiniteDist& prior,
                                     const UserView& user_view,
                                     const Registry& registry);

struct ExperimentOptions {
  std::int64_t max_rounds = 1'000'000;
};

// Draws x_1..x_n ~ prior up front, then follows the protocol: each round the
// selected user applies the assigned randomizer to their fixed datum.
absl::StatusOr<Transcript> FollowExpt(const Protocol& p,
                                      const FiniteDist& prior, int n,
                                      SeededRng& rng,
                                      const ExperimentOptions& options = {});

// Like FollowExpt, but before each round the selected user's datum is
// redrawn from the posterior given that user's rounds so far (the prior on
// first selection).
absl::StatusOr<Transcript> BayesExpt(const Protocol& p,
                                     const FiniteDist& prior, int n,
                                     SeededRng& rng,
                                     const ExperimentOptions& options = {});

struct CompositionReport {
  // Worst case over reachable transcripts of sum_{t: i_t = i} eps_t, where
  // eps_t is the minimal eps of the assigned randomizer.
  std::vector<double> per_user_eps_sum;
  double overall_eps = 0.0;
  double k_worst = 0.0;
  // Worst case of sum_t eps_t / (overall_eps * n).
  double k_average = 0.0;
  bool is_sequential = true;
  bool is_noninteractive = true;
  std::int64_t leaves = 0;
  int max_rounds = 0;
};

struct TreeOptions {
  std::int64_t max_leaves = 1'000'000;
  int max_depth = 1'000'000;
};

// Walks every transcript reachable with positive probability when data are
// drawn from `prior` and reports composition and interactivity. ResourceExhausted
// when the tree has more than `max_leaves` leaves.
absl::StatusOr<CompositionReport> Classify(const Protocol& p,
                                           const FiniteDist& prior, int n,
                                           double overall_eps,
                                           const TreeOptions& options = {});

}  // namespace ldp_interact

#endif  // LDP_INTERACT_PROTOCOL_H_
