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

#include "ldp_interact/rng.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace ldp_interact {
namespace {

TEST(SeededRngTest, SameSeedSameSequence) {
  SeededRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
  EXPECT_EQ(a.draws(), 1000u);
}

TEST(SeededRngTest, DifferentSeedsDiverge) {
  SeededRng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(SeededRngTest, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(DeriveSeed(7, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(DeriveSeed(7, 0), DeriveSeed(8, 0));
}

TEST(SeededRngTest, UniformInUnitInterval) {
  SeededRng rng(3);
  double sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12/kN) ~ 6.5e-4.
  EXPECT_NEAR(sum / kN, 0.5, 0.003);
}

TEST(SeededRngTest, UniformIntIsUnbiased) {
  SeededRng rng(11);
  std::vector<int> counts(6, 0);
  constexpr int kN = 600000;
  for (int i = 0; i < kN; ++i) ++counts[rng.UniformInt(6)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(kN), 1.0 / 6, 0.003);
}

TEST(SeededRngTest, LaplaceMomentsMatchScale) {
  SeededRng rng(5);
  constexpr int kN = 400000;
  const double b = 2.0;
  double abs_sum = 0.0, sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double z = rng.Laplace(b);
    sum += z;
    abs_sum += std::abs(z);
  }
  EXPECT_NEAR(sum / kN, 0.0, 0.02);
  EXPECT_NEAR(abs_sum / kN, b, 0.02);  // E|Z| = b
}

TEST(SeededRngTest, SplitMatchesDeriveSeed) {
  SeededRng parent(99);
  SeededRng child = parent.Split(4);
  SeededRng direct(DeriveSeed(99, 4));
  EXPECT_EQ(child(), direct());
}

}  // namespace
}  // namespace ldp_interact
