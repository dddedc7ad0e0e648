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

#ifndef LDP_INTERACT_REDUCTION_H_
#define LDP_INTERACT_REDUCTION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/randomizer.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

inline constexpr std::int64_t kDefaultMaxDraws = 1'000'000;

struct RejSampResult {
  Symbol message = 0;
  // Fresh prior draws, i.e. physical users consumed (the accepted one
  // included).
  std::int64_t draws_used = 0;
  Symbol accepted_datum = 0;
};

// Private rejection sampling. Draws x ~ prior; x accepts with probability
// p_x / 2 where p_x = L(x) / max_x* L(x*) is the likelihood ratio of the
// user's view; the accepted datum answers `target`. The returned message is
// distributed as target(x') with x' ~ posterior(prior, view).
//
// FailedPrecondition when the view is impossible or some p_x < e^{-eps}
// (the view was not produced eps-privately); ResourceExhausted after
// `max_draws` rejections.
absl::StatusOr<RejSampResult> RejSamp(const UserView& user_view,
                                      const Registry& registry,
                                      const FiniteDist& prior, double eps,
                                      const Randomizer& target, SeededRng& rng,
                                      std::int64_t max_draws = kDefaultMaxDraws);

// Same, with the view already folded into a likelihood.
absl::StatusOr<RejSampResult> RejSamp(const ViewLikelihood& likelihood,
                                      double eps, const Randomizer& target,
                                      SeededRng& rng,
                                      std::int64_t max_draws = kDefaultMaxDraws);

// Exact law of the accepted datum, prior(x) p_x / sum_x' prior(x') p_x'.
absl::StatusOr<FiniteDist> RejSampAcceptedDistribution(
    const UserView& user_view, const Registry& registry,
    const FiniteDist& prior);

// Exact expected number of draws, 2 / sum_x prior(x) p_x.
absl::StatusOr<double> RejSampExpectedDraws(const UserView& user_view,
                                            const Registry& registry,
                                            const FiniteDist& prior);

enum class RoundBranch {
  kFirstTouch,       // fresh user answers R_t directly
  kRejection,        // rejection sampling against r_tilde
  kDataIndependent,  // answered from mu; no user consumed
};

struct FreshUserEntry {
  int round = 0;
  std::int64_t count = 0;
};

struct ReductionRun {
  // The simulated transcript of the wrapped protocol.
  Transcript transcript;
  std::int64_t samples_used = 0;
  // Rejected draws per round (zero outside rejection rounds).
  std::vector<std::int64_t> per_round_rejections;
  // Physical users consumed, per round that consumed any. Every physical
  // user appears in exactly one entry and applies exactly one randomizer.
  std::vector<FreshUserEntry> fresh_user_log;
  std::vector<RoundBranch> branches;
  // Mixture weight gamma_t of each round (1 on first-touch rounds).
  std::vector<double> gammas;
};

struct ReductionOptions {
  // Decomposition anchor x0; the first domain symbol of each randomizer when
  // unset.
  std::optional<Symbol> anchor;
  std::int64_t max_draws = kDefaultMaxDraws;
  std::int64_t max_rounds = 1'000'000;
};

// A protocol compiled for sequential simulation: every registry randomizer
// decomposed at the target eps once, reused across runs. Immutable after
// construction; Run() may be called concurrently with distinct rngs.
class CompiledReduction {
 public:
  static absl::StatusOr<CompiledReduction> Create(
      const Protocol& p, double eps, const ReductionOptions& options = {});

  absl::StatusOr<ReductionRun> Run(const FiniteDist& prior, int n,
                                   SeededRng& rng) const;

  const Protocol& protocol() const { return protocol_; }
  double eps() const { return eps_; }
  // Decomposition of registry entry `id`, or the error that prevents it.
  const absl::StatusOr<Decomposition>& decomposition(int id) const {
    return decompositions_[static_cast<std::size_t>(id)];
  }

 private:
  CompiledReduction(Protocol p, double eps, ReductionOptions options)
      : protocol_(std::move(p)), eps_(eps), options_(options) {}

  Protocol protocol_;
  double eps_;
  ReductionOptions options_;
  std::vector<absl::StatusOr<Decomposition>> decompositions_;
};

// Runs the reduction once: first touches answer directly from a fresh prior
// draw; repeat queries flip a gamma_t coin between rejection sampling against
// the 2*eps part and the data-independent part of R_t.
absl::StatusOr<ReductionRun> ReductionExpt(const Protocol& p,
                                           const FiniteDist& prior, int n,
                                           double eps, SeededRng& rng,
                                           const ReductionOptions& options = {});

// n (2 e^eps eps / (1 - e^{-eps}) k + 1).
double ExpectedSampleBound(int n, double eps, double k);

struct SampleComplexitySummary {
  std::int64_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::vector<std::int64_t> samples;
};

// Runs `trials` reductions; trial t uses SeededRng(DeriveSeed(seed, t)).
absl::StatusOr<SampleComplexitySummary> EmpiricalSampleComplexity(
    const Protocol& p, const FiniteDist& prior, int n, double eps,
    std::int64_t trials, std::uint64_t seed, int threads = 1,
    const ReductionOptions& options = {});

// Nearest-rank quantile of sorted data.
double Quantile(const std::vector<std::int64_t>& sorted, double q);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_REDUCTION_H_
