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

#ifndef LDP_INTERACT_MPJ_H_
#define LDP_INTERACT_MPJ_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

// Largest total number of tree labels an instance may hold.
inline constexpr std::int64_t kMpjMaxEntries = std::int64_t{1} << 25;

// A labelled complete s-ary tree of depth d. levels[i] holds the s^i labels
// of depth i + 1, each in [0, s). path[i] is the label followed at depth
// i + 1 on the root-to-leaf path.
struct MpjInstance {
  int d = 0;
  std::int64_t s = 0;
  std::vector<std::vector<std::uint32_t>> levels;
  std::vector<std::uint32_t> path;
};

// A user's datum: level 0 is the dummy datum with an empty payload,
// otherwise the payload is the whole label vector of that level.
struct MpjDatum {
  int level = 0;
  std::span<const std::uint32_t> payload;
};

// Number of bits needed for one label: the smallest u with 2^u >= s.
int MpjGroupCount(std::int64_t s);

// Follows the labels from the root: the label used at depth i + 1 sits at
// base-s position P_1 ... P_i (0-based). InvalidArgument when a level has
// the wrong size or a label is out of range.
absl::StatusOr<std::vector<std::uint32_t>> ComputeMpjPath(
    int d, std::int64_t s,
    const std::vector<std::vector<std::uint32_t>>& levels);

// Validates `levels` and computes the path.
absl::StatusOr<MpjInstance> MakeMpjInstance(
    int d, std::int64_t s, std::vector<std::vector<std::uint32_t>> levels);

// Uniform labels. ResourceExhausted when the tree holds more than
// `max_entries` labels.
absl::StatusOr<MpjInstance> RandomMpjInstance(
    int d, std::int64_t s, SeededRng& rng,
    std::int64_t max_entries = kMpjMaxEntries);

// Dummy with probability 1/2, else a uniform level in [1, d].
int SampleMpjLevel(int d, SeededRng& rng);
MpjDatum SampleMpjDatum(const MpjInstance& inst, SeededRng& rng);

// Users per group: ceil(512 d^2 ln(d) (e^eps + 1)^2 / (e^eps - 1)^2), at
// least 1.
std::int64_t DefaultMpjGroupSize(int d, double eps);

struct MpjSolveResult {
  std::vector<std::uint32_t> output;
  bool success = false;
  std::int64_t n_users = 0;
  int rounds = 0;
};

// The fully interactive tester: u groups of m users, d rounds. In round r
// every user of group g reports randomized response on bit g of the label
// at the current position if they hold level r, and a fair coin otherwise;
// the majority of each group (ties to 1) fixes one bit of Q_r. A Q_r >= s
// is clamped to s - 1 and the trial fails.
absl::StatusOr<MpjSolveResult> SolveMpjFull(const MpjInstance& inst,
                                            double eps, std::int64_t m,
                                            SeededRng& rng);

// Sequentially interactive comparison: the same u * m users split into d
// cohorts, cohort r answering only round r with the same rule. Each user is
// queried once.
absl::StatusOr<MpjSolveResult> SolveMpjSequentialCohorts(
    const MpjInstance& inst, double eps, std::int64_t m, SeededRng& rng);

// Encoding of MPJ data as symbols for the exact protocol engine: 0 is the
// dummy; level l occupies s^(s^(l-1)) consecutive codes, one per label
// vector read as a base-s number with the first label most significant.
class MpjEncoding {
 public:
  static absl::StatusOr<MpjEncoding> Create(int d, std::int64_t s,
                                            std::int64_t max_domain);

  int d() const { return d_; }
  std::int64_t s() const { return s_; }
  std::int64_t domain_size() const { return offsets_.back(); }

  Symbol Encode(const MpjInstance& inst, int level) const;
  int LevelOf(Symbol code) const;
  // Label at position `index` of the level held by `code` (level >= 1).
  std::uint32_t Label(Symbol code, std::int64_t index) const;

 private:
  int d_ = 0;
  std::int64_t s_ = 0;
  // offsets_[l] is the first code of level l (offsets_[0] = 0 for the
  // dummy); offsets_[d + 1] is the domain size.
  std::vector<std::int64_t> offsets_;
};

inline constexpr std::int64_t kMpjMaxDomain = std::int64_t{1} << 16;

// The tester as an engine protocol over MpjEncoding symbols with n = u * m
// users, one randomizer per (round, position, group). Only small trees fit.
absl::StatusOr<Protocol> MpjFullProtocol(int d, std::int64_t s,
                                         std::int64_t m, double eps,
                                         std::int64_t max_domain = kMpjMaxDomain);

// Data distribution of `inst` over MpjEncoding symbols.
absl::StatusOr<FiniteDist> MpjPrior(const MpjInstance& inst,
                                    std::int64_t max_domain = kMpjMaxDomain);

// Worst-case per-user sum of round minimal eps over eps for the tester with
// s = 2 and one user per group, from Classify().
absl::StatusOr<double> CompositionalityOfMpj(int d, double eps);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_MPJ_H_
