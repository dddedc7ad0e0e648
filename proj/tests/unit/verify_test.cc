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

#include "ldp_interact/verify.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "ldp_interact/builtin_protocols.h"
#include "ldp_interact/reduction.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

using ::ldp_interact::testing::FixedSchedule;

TEST(EnumerateTest, ImmediateHalt) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("halt", 1, {rr}, {}));
  ASSERT_OK_AND_ASSIGN(TranscriptDist d,
                       EnumerateTranscripts(p, FiniteDist::Uniform(2), 1, Semantics::kFollow));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.begin()->first, TranscriptKey(Transcript{}));
  EXPECT_DOUBLE_EQ(d.begin()->second, 1.0);
}

TEST(EnumerateTest, SingleRoundUniformPrior) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, std::log(3.0)));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("one", 1, {rr}, {{0, 0}}));
  ASSERT_OK_AND_ASSIGN(TranscriptDist d,
                       EnumerateTranscripts(p, FiniteDist::Uniform(2), 1, Semantics::kFollow));
  ASSERT_EQ(d.size(), 2u);
  for (const auto& [key, prob] : d) EXPECT_NEAR(prob, 0.5, 1e-15);
}

// Noninteractive two-user schedule: each transcript's probability factors
// into per-user mixtures sum_x prior(x) prod rows.
TEST(EnumerateTest, FollowMatchesAnalyticMixture) {
  ASSERT_OK_AND_ASSIGN(Randomizer a, MakeRandomizedResponse(3, 1.0));
  ASSERT_OK_AND_ASSIGN(Randomizer b, MakeHistogramRound(3, 0, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("mix", 2, {a, b}, {{0, 0}, {1, 0}, {0, 1}}));
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.5, 0.3, 0.2}));
  ASSERT_OK_AND_ASSIGN(TranscriptDist d, EnumerateTranscripts(p, prior, 2, Semantics::kFollow));
  for (const auto& [key, prob] : d) {
    ASSERT_OK_AND_ASSIGN(std::vector<RoundRecord> rounds, ParseTranscriptKey(key));
    ASSERT_EQ(rounds.size(), 3u);
    double u0 = 0.0, u1 = 0.0;
    for (int x = 0; x < 3; ++x) {
      u0 += prior.Prob(x) * a.Prob(x, a.RangeIndex(rounds[0].message)) *
            b.Prob(x, b.RangeIndex(rounds[2].message));
      u1 += prior.Prob(x) * a.Prob(x, a.RangeIndex(rounds[1].message));
    }
    EXPECT_NEAR(prob, u0 * u1, 1e-12) << key;
  }
  EXPECT_NEAR(TotalMass(d), 1.0, 1e-12);
}

TEST(EnumerateTest, CorpusFollowEqualsBayes) {
  for (double eps : {0.5, 1.0}) {
    ASSERT_OK_AND_ASSIGN(std::vector<ProtocolInstance> corpus, VerificationCorpus(eps));
    ASSERT_GE(corpus.size(), 5u);
    for (const ProtocolInstance& inst : corpus) {
      ASSERT_OK_AND_ASSIGN(TranscriptDist f, EnumerateTranscripts(inst.protocol, inst.prior,
                                                                  inst.n, Semantics::kFollow));
      ASSERT_OK_AND_ASSIGN(TranscriptDist b, EnumerateTranscripts(inst.protocol, inst.prior,
                                                                  inst.n, Semantics::kBayes));
      ASSERT_EQ(f.size(), b.size()) << inst.protocol.name();
      for (const auto& [key, prob] : f) {
        EXPECT_NEAR(prob, b[key], 1e-9) << inst.protocol.name() << " " << key;
      }
      // Replay stability.
      ASSERT_OK_AND_ASSIGN(TranscriptDist f2, EnumerateTranscripts(inst.protocol, inst.prior,
                                                                   inst.n, Semantics::kFollow));
      EXPECT_EQ(f, f2);
    }
  }
}

TEST(EnumerateTest, ReductionLawMatchesFollow) {
  ASSERT_OK_AND_ASSIGN(std::vector<ProtocolInstance> corpus, VerificationCorpus(1.0));
  for (const ProtocolInstance& inst : corpus) {
    ASSERT_OK_AND_ASSIGN(CompiledReduction red, CompiledReduction::Create(inst.protocol, 1.0));
    ASSERT_OK_AND_ASSIGN(TranscriptDist r,
                         EnumerateReductionTranscripts(red, inst.prior, inst.n));
    ASSERT_OK_AND_ASSIGN(TranscriptDist f, EnumerateTranscripts(inst.protocol, inst.prior,
                                                                inst.n, Semantics::kFollow));
    for (const auto& [key, prob] : f) EXPECT_NEAR(prob, r[key], 1e-9) << key;
  }
}

TEST(EnumerateTest, LeafCapIsEnforced) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, HistogramProtocol(2, 1.0, 8));
  TreeOptions tight;
  tight.max_leaves = 100;
  EXPECT_FALSE(
      EnumerateTranscripts(inst.protocol, inst.prior, 8, Semantics::kFollow, tight).ok());
}

TEST(TranscriptKeyTest, ParseRoundTrips) {
  Transcript t;
  t.rounds = {{0, 1, 0.5, 0, 3}, {2, 0, 0.5, 0, -1}};
  ASSERT_OK_AND_ASSIGN(std::vector<RoundRecord> back, ParseTranscriptKey(TranscriptKey(t)));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].user, 2);
  EXPECT_EQ(back[1].message, -1);
  EXPECT_EQ(back[0].randomizer_id, 1);
  EXPECT_FALSE(ParseTranscriptKey("garbage").ok());
}

TEST(AuditTest, DataIndependentProtocolLeaksNothing) {
  ASSERT_OK_AND_ASSIGN(Randomizer coin, MakeBernoulli(0.3));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("coins", 2, {coin}, {{0, 0}, {1, 0}, {0, 0}}));
  const std::vector<Symbol> domain = {0, 1};
  ASSERT_OK_AND_ASSIGN(AuditReport r, AuditProtocol(p, 2, domain));
  EXPECT_NEAR(r.realized_eps, 0.0, 1e-12);
}

TEST(AuditTest, SingleRandomizedResponseRound) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("rr", 1, {rr}, {{0, 0}}));
  const std::vector<Symbol> domain = {0, 1};
  ASSERT_OK_AND_ASSIGN(AuditReport r, AuditProtocol(p, 1, domain));
  EXPECT_NEAR(r.realized_eps, 1.0, 1e-12);
  EXPECT_TRUE(r.has_witness);
  ASSERT_OK_AND_ASSIGN(std::vector<RoundRecord> rounds, ParseTranscriptKey(r.witness_transcript));
  ASSERT_OK_AND_ASSIGN(double lr, ViewLogRatio(p, rounds, r.witness_user, r.witness_x,
                                               r.witness_x_prime));
  EXPECT_NEAR(std::abs(lr), 1.0, 1e-12);
}

TEST(AuditTest, RepeatedQueriesCompose) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 0.4));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("rr3", 1, {rr}, {{0, 0}, {0, 0}, {0, 0}}));
  const std::vector<Symbol> domain = {0, 1};
  ASSERT_OK_AND_ASSIGN(AuditReport r, AuditProtocol(p, 1, domain));
  EXPECT_NEAR(r.realized_eps, 1.2, 1e-12);
}

TEST(AuditTest, HistogramProtocolIsEpsPrivate) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, HistogramProtocol(2, 1.0, 1));
  const std::vector<Symbol> domain = {0, 1};
  ASSERT_OK_AND_ASSIGN(AuditReport r, AuditProtocol(inst.protocol, 1, domain));
  EXPECT_NEAR(r.realized_eps, 1.0, 1e-9);
  ASSERT_OK_AND_ASSIGN(CompositionReport c, Classify(inst.protocol, inst.prior, 1, 1.0));
  EXPECT_GT(c.per_user_eps_sum[0], 1.0);
}

TEST(AuditTest, SingleRandomizerCorpusRespectsComposition) {
  ASSERT_OK_AND_ASSIGN(std::vector<ProtocolInstance> corpus, VerificationCorpus(1.0));
  for (const ProtocolInstance& inst : corpus) {
    const auto dom = inst.protocol.registry().front().domain();
    ASSERT_OK_AND_ASSIGN(AuditReport r, AuditProtocol(inst.protocol, inst.n,
                                                      std::vector<Symbol>(dom.begin(), dom.end())));
    EXPECT_LE(r.realized_eps, 1.0 + 1e-9) << inst.protocol.name();
  }
}

TEST(ReductionAuditTest, CorpusWithinThreeEps) {
  for (double eps : {0.5, 1.0}) {
    ASSERT_OK_AND_ASSIGN(std::vector<ProtocolInstance> corpus, VerificationCorpus(eps));
    for (const ProtocolInstance& inst : corpus) {
      ASSERT_OK_AND_ASSIGN(CompiledReduction red, CompiledReduction::Create(inst.protocol, eps));
      ASSERT_OK_AND_ASSIGN(ReductionAuditReport r, AuditReduction(red, inst.prior, inst.n));
      EXPECT_LE(r.realized_eps, 3 * eps + 1e-9) << inst.protocol.name();
      EXPECT_LE(r.accept_bit_eps, eps + 1e-9) << inst.protocol.name();
      EXPECT_LE(r.first_touch_eps, eps + 1e-9) << inst.protocol.name();
      EXPECT_GT(r.nodes, 0);
    }
  }
}

TEST(ChiSquareTest, KnownQuantiles) {
  EXPECT_NEAR(ChiSquarePValue(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(ChiSquarePValue(9.21034037197618, 2), 0.01, 1e-9);
  EXPECT_DOUBLE_EQ(ChiSquarePValue(0.0, 3), 1.0);
}

TranscriptDist FourCells(double a, double b, double c, double d) {
  return {{"a", a}, {"b", b}, {"c", c}, {"d", d}};
}

TranscriptCounts Draw(const TranscriptDist& dist, std::int64_t n, SeededRng& rng) {
  std::vector<std::string> keys;
  std::vector<double> probs;
  for (const auto& [k, p] : dist) {
    keys.push_back(k);
    probs.push_back(p);
  }
  const FiniteDist d = *FiniteDist::FromProbs(probs);
  TranscriptCounts counts;
  for (std::int64_t i = 0; i < n; ++i) ++counts[keys[d.SampleIndex(rng)]];
  return counts;
}

TEST(GTestEquivalenceTest, CalibratedUnderNull) {
  const TranscriptDist expected = FourCells(0.1, 0.2, 0.3, 0.4);
  SeededRng rng(101);
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    ASSERT_OK_AND_ASSIGN(GTestResult r, GTestEquivalence(Draw(expected, 100000, rng), expected, 0.01));
    passes += r.pass;
  }
  EXPECT_GE(passes, 96);
}

TEST(GTestEquivalenceTest, DetectsShiftedDistribution) {
  const TranscriptDist expected = FourCells(0.1, 0.2, 0.3, 0.4);
  const TranscriptDist shifted = FourCells(0.15, 0.2, 0.3, 0.35);  // TV 0.05
  SeededRng rng(102);
  int fails = 0;
  for (int rep = 0; rep < 100; ++rep) {
    ASSERT_OK_AND_ASSIGN(GTestResult r, GTestEquivalence(Draw(shifted, 100000, rng), expected, 0.01));
    fails += !r.pass;
  }
  EXPECT_GE(fails, 99);
}

TEST(GTestEquivalenceTest, ExactRealizationPassesWithPValueOne) {
  const TranscriptDist expected = {{"only", 1.0}};
  ASSERT_OK_AND_ASSIGN(GTestResult r, GTestEquivalence({{"only", 5000}}, expected, 0.01));
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(GTestEquivalenceTest, ErrorsAndImpossibleCells) {
  const TranscriptDist expected = FourCells(0.25, 0.25, 0.25, 0.25);
  EXPECT_FALSE(GTestEquivalence({{"a", 10}}, expected, 0.01).ok());
  ASSERT_OK_AND_ASSIGN(GTestResult r,
                       GTestEquivalence({{"a", 1000}, {"zz", 1}}, expected, 0.01));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.p_value, 0.0);
}

}  // namespace
}  // namespace ldp_interact
