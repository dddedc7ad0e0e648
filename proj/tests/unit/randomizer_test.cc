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

#include "ldp_interact/randomizer.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ldp_interact/builtin_protocols.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

TEST(RandomizedResponseTest, BinaryLn3) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, std::log(3.0)));
  EXPECT_NEAR(r.Prob(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(r.Prob(0, 1), 0.25, 1e-15);
  EXPECT_NEAR(r.Prob(1, 1), 0.75, 1e-15);
}

TEST(RandomizedResponseTest, TinyEpsIsNearlyUniform) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, 1e-12));
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) EXPECT_NEAR(r.Prob(x, y), 0.5, 1e-12);
  }
}

TEST(RandomizedResponseTest, FourSymbolsLn3) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(4, std::log(3.0)));
  for (int x = 0; x < 4; ++x) {
    double total = 0.0;
    for (int y = 0; y < 4; ++y) {
      EXPECT_NEAR(r.Prob(x, y), x == y ? 0.5 : 1.0 / 6, 1e-15);
      total += r.Prob(x, y);
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
  }
}

TEST(RandomizerTest, CreateValidatesRows) {
  EXPECT_FALSE(Randomizer::Create({0, 1}, {0, 1}, {{0.5, 0.5}}, 1.0).ok());
  EXPECT_FALSE(Randomizer::Create({0}, {0, 1}, {{0.5, 0.6}}, 1.0).ok());
  // Declared eps below what the table needs.
  EXPECT_FALSE(Randomizer::Create({0, 1}, {0, 1}, {{0.9, 0.1}, {0.1, 0.9}}, 0.5).ok());
}

TEST(BernoulliRandomizerTest, DataIndependent) {
  ASSERT_OK_AND_ASSIGN(Randomizer half, MakeBernoulli(0.5));
  EXPECT_EQ(MinimalEps(half), 0.0);
  ASSERT_OK_AND_ASSIGN(Randomizer one, MakeBernoulli(1.0));
  SeededRng rng(1);
  for (int i = 0; i < 20; ++i) {
    ASSERT_OK_AND_ASSIGN(Symbol y, Apply(one, 0, rng));
    EXPECT_EQ(y, 1);
  }
  ASSERT_OK_AND_ASSIGN(Randomizer b3, MakeBernoulli(0.3));
  EXPECT_NEAR(b3.Prob(1, 0), 0.7, 1e-15);
  EXPECT_NEAR(b3.Prob(1, 1), 0.3, 1e-15);
  EXPECT_TRUE(SatisfiesDp(b3, 0.0));
}

// Independent max log-ratio scan over the table.
double BruteMinimalEps(const Randomizer& r) {
  double worst = 0.0;
  for (std::size_t y = 0; y < r.range_size(); ++y) {
    for (std::size_t a = 0; a < r.domain_size(); ++a) {
      for (std::size_t b = 0; b < r.domain_size(); ++b) {
        const double pa = r.Prob(a, y), pb = r.Prob(b, y);
        if (pa == 0.0 && pb == 0.0) continue;
        if (pb == 0.0) return INFINITY;
        worst = std::max(worst, std::log(pa / pb));
      }
    }
  }
  return worst;
}

TEST(MinimalEpsTest, MatchesClosedForms) {
  ASSERT_OK_AND_ASSIGN(Randomizer rr, MakeRandomizedResponse(2, 0.8));
  EXPECT_NEAR(MinimalEps(rr), 0.8, 1e-12);
  ASSERT_OK_AND_ASSIGN(Randomizer hist, MakeHistogramRound(3, 1, 1.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(MinimalEps(hist), std::log((e + 1) / 2), 1e-12);
  EXPECT_NEAR(MinimalEps(hist), BruteMinimalEps(hist), 1e-12);
}

TEST(MinimalEpsTest, ZeroCellAgainstPositiveIsInfinite) {
  ASSERT_OK_AND_ASSIGN(Randomizer r,
                       Randomizer::Create({0, 1}, {0, 1}, {{1.0, 0.0}, {0.5, 0.5}},
                                          INFINITY));
  EXPECT_TRUE(std::isinf(MinimalEps(r)));
  EXPECT_FALSE(SatisfiesDp(r, 100.0));
}

TEST(ApplyTest, FrequencyAndDeterminism) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, std::log(3.0)));
  SeededRng rng(31);
  constexpr int kN = 100000;
  int zeros = 0;
  for (int i = 0; i < kN; ++i) {
    ASSERT_OK_AND_ASSIGN(Symbol y, Apply(r, 0, rng));
    zeros += y == 0;
  }
  EXPECT_NEAR(zeros / static_cast<double>(kN), 0.75, 0.005);
  SeededRng a(4), b(4);
  for (int i = 0; i < 100; ++i) {
    ASSERT_OK_AND_ASSIGN(Symbol ya, Apply(r, 1, a));
    ASSERT_OK_AND_ASSIGN(Symbol yb, Apply(r, 1, b));
    EXPECT_EQ(ya, yb);
  }
  EXPECT_FALSE(Apply(r, 5, rng).ok());
}

TEST(DecomposeTest, TightEpsGivesGammaOne) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, 1.0));
  ASSERT_OK_AND_ASSIGN(Decomposition d, Decompose(r, 1.0, 0));
  EXPECT_NEAR(d.gamma, 1.0, 1e-12);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) EXPECT_NEAR(d.r_tilde.Prob(x, y), r.Prob(x, y), 1e-12);
  }
}

TEST(DecomposeTest, DataIndependentGivesGammaZero) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeBernoulli(0.3));
  ASSERT_OK_AND_ASSIGN(Decomposition d, Decompose(r, 1.0, 0));
  EXPECT_EQ(d.gamma, 0.0);
  EXPECT_NEAR(d.mu.Prob(1), 0.3, 1e-15);
}

TEST(DecomposeTest, HandWorkedGamma) {
  // eps' = ln 2 against eps = 2 ln 2: gamma = (1/2 - 1) / (1/4 - 1) = 2/3.
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, std::log(2.0)));
  ASSERT_OK_AND_ASSIGN(Decomposition d, Decompose(r, 2 * std::log(2.0), 0));
  EXPECT_NEAR(d.gamma, 2.0 / 3.0, 1e-12);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      EXPECT_NEAR(d.gamma * d.r_tilde.Prob(x, y) + (1 - d.gamma) * d.mu.Prob(y),
                  r.Prob(x, y), 1e-12);
    }
  }
  EXPECT_LE(MinimalEps(d.r_tilde), 4 * std::log(2.0) + 1e-9);
}

TEST(DecomposeTest, RejectsEpsBelowMinimal) {
  ASSERT_OK_AND_ASSIGN(Randomizer r, MakeRandomizedResponse(2, 1.0));
  EXPECT_FALSE(Decompose(r, 0.5, 0).ok());
}

TEST(DecomposeTest, RandomTablesReconstruct) {
  SeededRng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(3));
    const int m = 2 + static_cast<int>(rng.UniformInt(3));
    std::vector<std::vector<double>> rows(k, std::vector<double>(m));
    for (auto& row : rows) {
      double s = 0;
      for (double& v : row) s += (v = 0.2 + rng.Uniform());
      for (double& v : row) v /= s;
    }
    std::vector<Symbol> dom(k), ran(m);
    for (int i = 0; i < k; ++i) dom[i] = i;
    for (int i = 0; i < m; ++i) ran[i] = i;
    ASSERT_OK_AND_ASSIGN(Randomizer r, Randomizer::Create(dom, ran, rows, INFINITY));
    const double eps_prime = MinimalEps(r);
    for (double eps : {eps_prime, 1.5 * eps_prime, 3 * eps_prime}) {
      ASSERT_OK_AND_ASSIGN(Decomposition d, Decompose(r, eps));
      for (int x = 0; x < k; ++x) {
        for (int y = 0; y < m; ++y) {
          ASSERT_NEAR(MixtureProb(d, x, y), r.Prob(x, y), 1e-12);
        }
      }
      EXPECT_LE(MinimalEps(d.r_tilde), 2 * eps + 1e-9);
    }
  }
}

}  // namespace
}  // namespace ldp_interact
