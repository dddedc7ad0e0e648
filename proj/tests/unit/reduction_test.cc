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

#include "ldp_interact/reduction.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ldp_interact/builtin_protocols.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

using ::ldp_interact::testing::FixedSchedule;

TEST(RejSampTest, EmptyViewAcceptsFromPrior) {
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.25, 0.75}));
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  const Registry reg{rr};
  ASSERT_OK_AND_ASSIGN(FiniteDist acc, RejSampAcceptedDistribution({}, reg, prior));
  EXPECT_NEAR(acc.Prob(1), 0.75, 1e-15);
  ASSERT_OK_AND_ASSIGN(double draws, RejSampExpectedDraws({}, reg, prior));
  EXPECT_NEAR(draws, 2.0, 1e-12);  // accept probability exactly 1/2
}

TEST(RejSampTest, OneRoundAcceptedLawIsPosterior) {
  const double eps = 1.0;
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, eps));
  const Registry reg{rr};
  const UserView view = {{0, 0}};
  ASSERT_OK_AND_ASSIGN(FiniteDist acc,
                       RejSampAcceptedDistribution(view, reg, FiniteDist::Uniform(2)));
  const double e = std::exp(eps);
  EXPECT_NEAR(acc.Prob(0), e / (e + 1), 1e-12);
  ASSERT_OK_AND_ASSIGN(FiniteDist post, Posterior(FiniteDist::Uniform(2), view, reg));
  EXPECT_NEAR(acc.Prob(0), post.Prob(0), 1e-12);
  // p_0 = 1, p_1 = e^{-eps}: accept prob = (1 + e^{-eps}) / 4.
  ASSERT_OK_AND_ASSIGN(double draws, RejSampExpectedDraws(view, reg, FiniteDist::Uniform(2)));
  EXPECT_NEAR(draws, 4.0 / (1.0 + 1.0 / e), 1e-12);
}

TEST(RejSampTest, EmpiricalAcceptedFrequenciesAndDraws) {
  const double eps = 1.0;
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, eps));
  ASSERT_OK_AND_ASSIGN(Randomizer target, MakeRandomizedResponse(2, 2 * eps));
  const Registry reg{rr};
  const UserView view = {{0, 1}};
  const FiniteDist prior = FiniteDist::Uniform(2);
  SeededRng rng(17);
  constexpr int kN = 40000;
  int ones = 0;
  double draws = 0.0;
  for (int i = 0; i < kN; ++i) {
    ASSERT_OK_AND_ASSIGN(RejSampResult r, RejSamp(view, reg, prior, eps, target, rng));
    ones += r.accepted_datum == 1;
    draws += static_cast<double>(r.draws_used);
  }
  const double e = std::exp(eps);
  EXPECT_NEAR(ones / static_cast<double>(kN), e / (e + 1), 0.01);
  ASSERT_OK_AND_ASSIGN(double expected, RejSampExpectedDraws(view, reg, prior));
  EXPECT_NEAR(draws / kN, expected, 0.05);
  EXPECT_LE(draws / kN, 2 * e + 0.05);
}

TEST(RejSampTest, InconsistentViewIsRejected) {
  // Message 1 from a randomizer stronger than eps.
  ASSERT_OK_AND_ASSIGN(Randomizer strong, MakeRandomizedResponse(2, 3.0));
  ASSERT_OK_AND_ASSIGN(Randomizer target, MakeRandomizedResponse(2, 1.0));
  SeededRng rng(1);
  EXPECT_FALSE(RejSamp({{0, 1}}, Registry{strong}, FiniteDist::Uniform(2), 1.0, target, rng)
                   .ok());
}

TEST(ReductionTest, ImmediateHaltUsesNoSamples) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("halt", 1, {rr}, {}));
  SeededRng rng(1);
  ASSERT_OK_AND_ASSIGN(ReductionRun run, ReductionExpt(p, FiniteDist::Uniform(2), 1, 1.0, rng));
  EXPECT_TRUE(run.transcript.empty());
  EXPECT_EQ(run.samples_used, 0);
  ASSERT_OK_AND_ASSIGN(SampleComplexitySummary s,
                       EmpiricalSampleComplexity(p, FiniteDist::Uniform(2), 1, 1.0, 50, 3));
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.max, 0);
}

TEST(ReductionTest, NoninteractiveProtocolUsesOneSamplePerUser) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("rr3", 3, {rr}, {{0, 0}, {1, 0}, {2, 0}}));
  SeededRng rng(5);
  ASSERT_OK_AND_ASSIGN(ReductionRun run, ReductionExpt(p, FiniteDist::Uniform(2), 3, 1.0, rng));
  EXPECT_EQ(run.samples_used, 3);
  for (RoundBranch b : run.branches) EXPECT_EQ(b, RoundBranch::kFirstTouch);
}

TEST(ReductionTest, RequeriesDrawFreshUsers) {
  // Three RR(1) answers from one user: 3-LDP overall.
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("rep", 1, {rr}, {{0, 0}, {0, 0}, {0, 0}}));
  SeededRng rng(5);
  std::int64_t total = 0;
  for (int i = 0; i < 200; ++i) {
    ASSERT_OK_AND_ASSIGN(ReductionRun run,
                         ReductionExpt(p, FiniteDist::Uniform(2), 1, 3.0, rng));
    EXPECT_GE(run.samples_used, 1);
    EXPECT_EQ(run.transcript.size(), 3u);
    std::int64_t logged = 0;
    for (const auto& e : run.fresh_user_log) logged += e.count;
    EXPECT_EQ(logged, run.samples_used);
    total += run.samples_used;
  }
  EXPECT_GT(total, 200);
}

TEST(ReductionTest, SameSeedSameRun) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, CorpusProtocol("adaptive_requery", 1.0));
  SeededRng a(44), b(44);
  ASSERT_OK_AND_ASSIGN(ReductionRun ra, ReductionExpt(inst.protocol, inst.prior, inst.n, 1.0, a));
  ASSERT_OK_AND_ASSIGN(ReductionRun rb, ReductionExpt(inst.protocol, inst.prior, inst.n, 1.0, b));
  EXPECT_EQ(TranscriptKey(ra.transcript), TranscriptKey(rb.transcript));
  EXPECT_EQ(ra.samples_used, rb.samples_used);
}

TEST(SampleComplexityTest, BoundFormula) {
  const double e = std::exp(1.0);
  EXPECT_NEAR(ExpectedSampleBound(20, 1.0, 1.5), 20 * (2 * e * 1.0 / (1 - 1 / e) * 1.5 + 1),
              1e-9);
}

TEST(SampleComplexityTest, ThreadCountDoesNotChangeResults) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, HistogramProtocol(2, 1.0, 4));
  ASSERT_OK_AND_ASSIGN(SampleComplexitySummary one,
                       EmpiricalSampleComplexity(inst.protocol, inst.prior, 4, 1.0, 300, 9, 1));
  ASSERT_OK_AND_ASSIGN(SampleComplexitySummary four,
                       EmpiricalSampleComplexity(inst.protocol, inst.prior, 4, 1.0, 300, 9, 4));
  EXPECT_EQ(one.samples, four.samples);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_LE(one.q50, one.q90);
  EXPECT_LE(one.q90, one.q99);
}

TEST(QuantileTest, NearestRank) {
  const std::vector<std::int64_t> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(Quantile(v, 0.5), 5);
  EXPECT_EQ(Quantile(v, 0.9), 9);
  EXPECT_EQ(Quantile(v, 1.0), 10);
}

}  // namespace
}  // namespace ldp_interact
