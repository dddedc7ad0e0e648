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

#ifndef LDP_INTERACT_BUILTIN_PROTOCOLS_H_
#define LDP_INTERACT_BUILTIN_PROTOCOLS_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/randomizer.h"

namespace ldp_interact {

// A protocol together with the data distribution and population size it is
// meant to run with.
struct ProtocolInstance {
  Protocol protocol;
  FiniteDist prior;
  int n = 0;
};

// Round randomizer of the histogram protocol: on {0..d-1} -> {0, 1}, datum
// `hot` answers randomized response on bit 1, every other datum flips a fair
// coin. Minimal eps is ln((e^eps + 1) / 2).
absl::StatusOr<Randomizer> MakeHistogramRound(int d, int hot, double eps);

// Data universe {e_1..e_d} encoded as {0..d-1}. For each round j, every user
// i in turn applies MakeHistogramRound(d, j, eps). eps-LDP overall while each
// user's summed round eps is d ln((e^eps + 1) / 2). Prior is uniform.
absl::StatusOr<ProtocolInstance> HistogramProtocol(int d, double eps, int n);

// Noninteractive tester: every user applies randomized response with `eps`
// to argmax_j P_j(x) (ties to 0). Domain is the union of both supports;
// prior is p0.
absl::StatusOr<ProtocolInstance> SimpleHypotestProtocol(const FiniteDist& p0,
                                                        const FiniteDist& p1,
                                                        double eps, int n);

// Small fully interactive eps-LDP protocols (n <= 3 users, <= 4 rounds,
// binary messages, |X| <= 3) used to check transcript-distribution identities
// exactly.
absl::StatusOr<std::vector<ProtocolInstance>> VerificationCorpus(double eps);

// Corpus member by name; NotFound for unknown names.
absl::StatusOr<ProtocolInstance> CorpusProtocol(const std::string& name,
                                                double eps);
std::vector<std::string> CorpusNames();

}  // namespace ldp_interact

#endif  // LDP_INTERACT_BUILTIN_PROTOCOLS_H_
