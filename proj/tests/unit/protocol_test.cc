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

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "gtest/gtest.h"
#include "ldp_interact/builtin_protocols.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

using ::ldp_interact::testing::FixedSchedule;

TEST(ProtocolTest, ImmediateHaltGivesEmptyTranscript) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("halt", 1, {rr}, {}));
  SeededRng rng(1);
  ASSERT_OK_AND_ASSIGN(Transcript t, FollowExpt(p, FiniteDist::Uniform(2), 1, rng));
  EXPECT_TRUE(t.empty());
  ASSERT_OK_AND_ASSIGN(Transcript b, BayesExpt(p, FiniteDist::Uniform(2), 1, rng));
  EXPECT_TRUE(b.empty());
}

TEST(ProtocolTest, SingleRoundMessageFrequency) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, std::log(3.0)));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("one", 1, {rr}, {{0, 0}}));
  SeededRng rng(9);
  constexpr int kN = 100000;
  int zeros = 0;
  for (int i = 0; i < kN; ++i) {
    ASSERT_OK_AND_ASSIGN(Transcript t, FollowExpt(p, FiniteDist::PointMass(0), 1, rng));
    ASSERT_EQ(t.size(), 1u);
    zeros += t.rounds[0].message == 0;
  }
  EXPECT_NEAR(zeros / static_cast<double>(kN), 0.75, 0.005);
}

TEST(ProtocolTest, RequeryRecordsSameUser) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 0.5));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("requery", 2, {rr}, {{1, 0}, {1, 0}}));
  SeededRng rng(2);
  ASSERT_OK_AND_ASSIGN(Transcript t, FollowExpt(p, FiniteDist::Uniform(2), 2, rng));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.rounds[0].user, 1);
  EXPECT_EQ(t.rounds[1].user, 1);
}

TEST(ProtocolTest, EngineRejectsUndercharging) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  auto reg = std::make_shared<const Registry>(Registry{rr});
  ASSERT_OK_AND_ASSIGN(
      Protocol p,
      Protocol::Create("cheat", 1, reg, [](std::span<const RoundRecord> prefix)
                                            -> std::optional<Assignment> {
        if (!prefix.empty()) return std::nullopt;
        return Assignment{0, 0, 0.5, 0.0};
      }));
  SeededRng rng(1);
  EXPECT_FALSE(FollowExpt(p, FiniteDist::Uniform(2), 1, rng).ok());
}

TEST(ProtocolTest, EngineRejectsOutOfRangeUser) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("oob", 1, {rr}, {{3, 0}}));
  SeededRng rng(1);
  EXPECT_FALSE(FollowExpt(p, FiniteDist::Uniform(2), 1, rng).ok());
}

TEST(PosteriorTest, EmptyViewReturnsPrior) {
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.2, 0.3, 0.5}));
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(3, 1.0));
  ASSERT_OK_AND_ASSIGN(FiniteDist post, Posterior(prior, {}, Registry{rr}));
  for (Symbol x = 0; x < 3; ++x) EXPECT_NEAR(post.Prob(x), prior.Prob(x), 1e-15);
}

TEST(PosteriorTest, OneRandomizedResponseRound) {
  const double eps = 0.7;
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, eps));
  ASSERT_OK_AND_ASSIGN(FiniteDist post,
                       Posterior(FiniteDist::Uniform(2), {{0, 0}}, Registry{rr}));
  EXPECT_NEAR(post.Prob(0), std::exp(eps) / (std::exp(eps) + 1), 1e-12);
}

// Posterior against brute-force joint enumeration over (x, messages).
TEST(PosteriorTest, MatchesJointEnumeration) {
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.5, 0.3, 0.2}));
  ASSERT_OK_AND_ASSIGN(Randomizer a, MakeRandomizedResponse(3, 1.2));
  ASSERT_OK_AND_ASSIGN(Randomizer b, MakeHistogramRound(3, 2, 1.0));
  const Registry reg{a, b};
  const UserView view = {{0, 1}, {1, 1}, {0, 1}};
  double joint[3];
  double total = 0.0;
  for (int x = 0; x < 3; ++x) {
    joint[x] = prior.Prob(x) * a.Prob(x, 1) * b.Prob(x, 1) * a.Prob(x, 1);
    total += joint[x];
  }
  ASSERT_OK_AND_ASSIGN(FiniteDist post, Posterior(prior, view, reg));
  for (int x = 0; x < 3; ++x) EXPECT_NEAR(post.Prob(x), joint[x] / total, 1e-12);
}

TEST(PosteriorTest, DataIndependentRoundsLeavePriorUnchanged) {
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.1, 0.9}));
  ASSERT_OK_AND_ASSIGN(Randomizer coin, MakeBernoulli(0.5));
  ASSERT_OK_AND_ASSIGN(FiniteDist post,
                       Posterior(prior, {{0, 0}, {0, 1}, {0, 1}}, Registry{coin}));
  EXPECT_NEAR(post.Prob(1), 0.9, 1e-15);
}

TEST(TranscriptKeyTest, CanonicalAndDistinct) {
  Transcript a, b;
  a.rounds = {{0, 1, 0.5, 0.0, 1}, {1, 0, 0.5, 0.0, 0}};
  b.rounds = {{0, 1, 0.9, 0.0, 1}, {1, 0, 0.1, 0.0, 0}};
  EXPECT_EQ(TranscriptKey(a), TranscriptKey(b));  // eps is not part of the key
  b.rounds[1].message = 1;
  EXPECT_NE(TranscriptKey(a), TranscriptKey(b));
}

TEST(ViewOfTest, ExtractsOneUser) {
  std::vector<RoundRecord> rounds = {
      {0, 1, 0, 0, 5}, {1, 0, 0, 0, 6}, {0, 2, 0, 0, 7}};
  const UserView v = ViewOf(rounds, 0);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], std::make_pair(1, Symbol{5}));
  EXPECT_EQ(v[1], std::make_pair(2, Symbol{7}));
}

TEST(ClassifyTest, NoninteractiveRandomizedResponse) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p,
                       FixedSchedule("rr", 3, {rr}, {{0, 0}, {1, 0}, {2, 0}}, 1.0));
  ASSERT_OK_AND_ASSIGN(CompositionReport r, Classify(p, FiniteDist::Uniform(2), 3, 1.0));
  EXPECT_NEAR(r.k_worst, 1.0, 1e-12);
  EXPECT_TRUE(r.is_noninteractive);
  EXPECT_TRUE(r.is_sequential);
}

TEST(ClassifyTest, HistogramProtocolIsNotCompositional) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, HistogramProtocol(3, 1.0, 1));
  ASSERT_OK_AND_ASSIGN(CompositionReport r, Classify(inst.protocol, inst.prior, 1, 1.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(r.k_worst, 3 * std::log((e + 1) / 2), 1e-9);
  EXPECT_GT(r.k_worst, 1.0);
}

TEST(ClassifyTest, AdaptiveSequentialProtocol) {
  // User 1's randomizer depends on user 0's message; nobody is re-queried.
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Randomizer coin, MakeBernoulli(0.5));
  auto reg = std::make_shared<const Registry>(Registry{rr, coin});
  ASSERT_OK_AND_ASSIGN(
      Protocol p,
      Protocol::Create("adaptive", 2, reg,
                       [](std::span<const RoundRecord> prefix) -> std::optional<Assignment> {
                         if (prefix.empty()) return Assignment{0, 0, 1.0, 0.0};
                         if (prefix.size() == 1) {
                           return prefix[0].message == 0 ? Assignment{1, 0, 1.0, 0.0}
                                                         : Assignment{1, 1, 0.0, 0.0};
                         }
                         return std::nullopt;
                       },
                       1.0));
  ASSERT_OK_AND_ASSIGN(CompositionReport r, Classify(p, FiniteDist::Uniform(2), 2, 1.0));
  EXPECT_TRUE(r.is_sequential);
  EXPECT_FALSE(r.is_noninteractive);
}

TEST(ClassifyTest, RequeryingProtocolIsNotSequential) {
  ASSERT_OK_AND_ASSIGN(ProtocolInstance inst, CorpusProtocol("adaptive_requery", 1.0));
  ASSERT_OK_AND_ASSIGN(CompositionReport r,
                       Classify(inst.protocol, inst.prior, inst.n, 1.0));
  EXPECT_FALSE(r.is_sequential);
  EXPECT_FALSE(r.is_noninteractive);
}

TEST(ExperimentTest, NoninteractiveFollowAndBayesAgreeEmpirically) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Protocol p, FixedSchedule("rr2", 2, {rr}, {{0, 0}, {1, 0}}));
  ASSERT_OK_AND_ASSIGN(FiniteDist prior, FiniteDist::FromProbs({0.3, 0.7}));
  std::map<std::string, int> f, b;
  SeededRng rf(1), rb(2);
  for (int i = 0; i < 40000; ++i) {
    ASSERT_OK_AND_ASSIGN(Transcript tf, FollowExpt(p, prior, 2, rf));
    ASSERT_OK_AND_ASSIGN(Transcript tb, BayesExpt(p, prior, 2, rb));
    ++f[TranscriptKey(tf)];
    ++b[TranscriptKey(tb)];
  }
  for (const auto& [k, v] : f) EXPECT_NEAR(v / 40000.0, b[k] / 40000.0, 0.015) << k;
}

}  // namespace
}  // namespace ldp_interact
