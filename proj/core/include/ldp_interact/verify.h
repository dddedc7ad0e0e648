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

#ifndef LDP_INTERACT_VERIFY_H_
#define LDP_INTERACT_VERIFY_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/reduction.h"

namespace ldp_interact {

// Exact transcript law keyed by TranscriptKey().
using TranscriptDist = std::map<std::string, double>;
using TranscriptCounts = std::map<std::string, std::int64_t>;

enum class Semantics {
  kFollow,  // each user's datum is drawn once and kept
  kBayes,   // each round redraws the datum from the user's posterior
};

// Exact distribution of the transcript when data are i.i.d. from `prior`.
// Follow semantics multiplies, per user, sum_x prior(x) prod_t R_t(x)(y_t);
// Bayes semantics multiplies the per-round posterior predictive
// probabilities. ResourceExhausted above options.max_leaves transcripts.
absl::StatusOr<TranscriptDist> EnumerateTranscripts(
    const Protocol& p, const FiniteDist& prior, int n, Semantics semantics,
    const TreeOptions& options = {});

// Exact law of the transcript simulated by `reduction`: first touches follow
// the prior predictive; repeat queries mix gamma * r_tilde applied to the
// rejection sampler's accepted datum with (1 - gamma) * mu.
absl::StatusOr<TranscriptDist> EnumerateReductionTranscripts(
    const CompiledReduction& reduction, const FiniteDist& prior, int n,
    const TreeOptions& options = {});

// Parses a TranscriptKey() string back into rounds (eps and delta are left
// at zero).
absl::StatusOr<std::vector<RoundRecord>> ParseTranscriptKey(
    const std::string& key);

// sum of probabilities, for sanity checks.
double TotalMass(const TranscriptDist& dist);

struct AuditReport {
  // max over users i, data v, v' and transcripts of
  // ln(P[transcript | x_i = v] / P[transcript | x_i = v']).
  double realized_eps = 0.0;
  bool has_witness = false;
  int witness_user = 0;
  Symbol witness_x = 0;
  Symbol witness_x_prime = 0;
  std::string witness_transcript;
  std::int64_t transcripts = 0;
};

// Worst case over datasets in domain^n that differ in one user. Every
// transcript that some dataset can produce is visited; the ratio only
// involves the differing user's own rounds.
absl::StatusOr<AuditReport> AuditProtocol(const Protocol& p, int n,
                                          std::span<const Symbol> domain,
                                          const TreeOptions& options = {});

// ln(prod_t R_t(x)(y_t) / prod_t R_t(x')(y_t)) over `user`'s rounds.
absl::StatusOr<double> ViewLogRatio(const Protocol& p,
                                    std::span<const RoundRecord> rounds,
                                    int user, Symbol x, Symbol x_prime);

struct ReductionAuditReport {
  // Worst physical channel overall: first touch, or accept bit plus message.
  double realized_eps = 0.0;
  // Accept/reject bit alone.
  double accept_bit_eps = 0.0;
  // (reject) or (accept, message) through r_tilde.
  double rejection_channel_eps = 0.0;
  double first_touch_eps = 0.0;
  std::string witness_transcript;
  std::int64_t nodes = 0;
};

// Audits what one physical user of the reduction reveals, at every prefix
// reachable under `prior`. Data range over the prior's support, which should
// cover the domain for a worst-case audit.
absl::StatusOr<ReductionAuditReport> AuditReduction(
    const CompiledReduction& reduction, const FiniteDist& prior, int n,
    const TreeOptions& options = {});

struct GTestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool pass = true;
  std::int64_t total = 0;
  int cells = 0;
};

// Upper tail of the chi-square distribution; 1 when df == 0.
double ChiSquarePValue(double statistic, int df);

// Likelihood-ratio goodness of fit of `observed` against `expected`. Cells
// are merged smallest first until each expects >= `min_expected` counts.
// Mass on a transcript with zero expected probability fails outright.
// InvalidArgument below 1000 total counts.
absl::StatusOr<GTestResult> GTestEquivalence(const TranscriptCounts& observed,
                                             const TranscriptDist& expected,
                                             double significance,
                                             double min_expected = 10.0);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_VERIFY_H_
