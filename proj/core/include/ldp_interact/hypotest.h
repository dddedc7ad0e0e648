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

#ifndef LDP_INTERACT_HYPOTEST_H_
#define LDP_INTERACT_HYPOTEST_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/finite_dist.h"
#include "ldp_interact/rng.h"

namespace ldp_interact {

// Two fixed hypotheses with alpha = TV(p0, p1) > 0.
struct SimpleTestInstance {
  FiniteDist p0 = FiniteDist::PointMass(0);
  FiniteDist p1 = FiniteDist::PointMass(0);
  double alpha = 0.0;

  // InvalidArgument when the hypotheses coincide.
  static absl::StatusOr<SimpleTestInstance> Create(FiniteDist p0,
                                                   FiniteDist p1);
};

// Unbiased count from n_hat randomized-response reports of 1 among n:
// (e^eps + 1) / (e^eps - 1) * (n_hat - n / (e^eps + 1)).
double Debias(double n_hat, std::int64_t n, double eps);

// 1 when p1(x) > p0(x), else 0 (ties go to p0).
int LikelihoodBit(const SimpleTestInstance& inst, Symbol x);

// Noninteractive test: n users draw x from p_truth, report randomized
// response on LikelihoodBit(x); the analyst returns the hypothesis with the
// larger debiased count (ties to 0). Returns 0 or 1.
absl::StatusOr<int> SimpleTest(const SimpleTestInstance& inst, double eps,
                               std::int64_t n, int truth, SeededRng& rng);

// Fraction of `trials` runs that pick the truth; even trials use p0, odd p1.
absl::StatusOr<double> SimpleTestSuccessRate(const SimpleTestInstance& inst,
                                             double eps, std::int64_t n,
                                             std::int64_t trials,
                                             std::uint64_t seed,
                                             int threads = 1);

// Two hypothesis classes given as convex hulls of distributions over a
// common ground set.
struct CompoundInstance {
  std::vector<Symbol> ground_set;
  std::vector<FiniteDist> h0;
  std::vector<FiniteDist> h1;
  // Certified game value, filled by SolveEventGame.
  double alpha = 0.0;

  // Every vertex must be supported inside `ground_set`.
  static absl::StatusOr<CompoundInstance> Create(std::vector<Symbol> ground_set,
                                                 std::vector<FiniteDist> h0,
                                                 std::vector<FiniteDist> h1);
};

// A distribution over events (subsets of the ground set).
struct EventDistribution {
  std::vector<std::vector<Symbol>> events;
  std::vector<double> weights;
  // scores[i] = P_{E~S}[ground_set[i] in E].
  std::vector<double> scores;
  // min over vertex pairs of E_S[P(E) - Q(E)].
  double value = 0.0;
  // Dual bound on the game value; upper_bound - value <= tol.
  double upper_bound = 0.0;
};

inline constexpr int kMaxEventGroundSet = 16;

// Maximin event distribution for sup_S inf_{P in H0, Q in H1}
// E_{E~S}[P(E) - Q(E)], solved exactly as a linear program over the score
// vector and returned as nested threshold events. InvalidArgument for more
// than 16 ground symbols or empty hulls; FailedPrecondition when the value
// is <= tol; Internal when the duality gap exceeds tol.
absl::StatusOr<EventDistribution> SolveEventGame(const CompoundInstance& inst,
                                                 double tol = 1e-6);

// E_{x~dist} scores(x).
double ExpectedScore(const CompoundInstance& inst, const EventDistribution& s,
                     const FiniteDist& dist);

// Midpoint between the lowest H0 and highest H1 vertex score.
double CompoundThreshold(const CompoundInstance& inst,
                         const EventDistribution& s);

// Users draw x ~ true_dist and publish score(x) + Laplace(1/eps); the
// analyst returns 0 (H0) when the mean is at least the threshold, else 1.
absl::StatusOr<int> CompoundTest(const CompoundInstance& inst,
                                 const EventDistribution& s, double eps,
                                 std::int64_t n, const FiniteDist& true_dist,
                                 SeededRng& rng);

// Even trials draw from H0 vertices, odd trials from H1 vertices, cycling.
absl::StatusOr<double> CompoundTestSuccessRate(const CompoundInstance& inst,
                                               const EventDistribution& s,
                                               double eps, std::int64_t n,
                                               std::int64_t trials,
                                               std::uint64_t seed,
                                               int threads = 1);

// ceil(c / (eps^2 alpha^2)).
std::int64_t ScaledSampleSize(double c, double eps, double alpha);

struct Calibration {
  bool found = false;
  double c = 0.0;
  std::int64_t n = 0;
  double success = 0.0;
  std::int64_t n_quarter = 0;
  double success_quarter = 0.0;
};

// First constant in `constants` whose sample size reaches `target` success,
// plus the success rate at a quarter of that sample size.
absl::StatusOr<Calibration> CalibrateSampleConstant(
    double eps, double alpha,
    const std::function<absl::StatusOr<double>(std::int64_t)>& success_at,
    const std::vector<double>& constants = {1, 2, 4, 8, 16, 32, 64},
    double target = 2.0 / 3.0);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_HYPOTEST_H_
