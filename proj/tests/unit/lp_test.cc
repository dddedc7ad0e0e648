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

#include "ldp_interact/lp.h"

#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

TEST(MaximizeLpTest, TextbookProblem) {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2, 6).
  ASSERT_OK_AND_ASSIGN(LpSolution s,
                       MaximizeLp({{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18}, {3, 5}));
  EXPECT_NEAR(s.objective, 36.0, 1e-9);
  EXPECT_NEAR(s.x[0], 2.0, 1e-9);
  EXPECT_NEAR(s.x[1], 6.0, 1e-9);
  // Strong duality: b . y = objective.
  ASSERT_EQ(s.duals.size(), 3u);
  EXPECT_NEAR(4 * s.duals[0] + 12 * s.duals[1] + 18 * s.duals[2], 36.0, 1e-9);
  for (double y : s.duals) EXPECT_GE(y, 0.0);
}

TEST(MaximizeLpTest, DegenerateProblemTerminates) {
  ASSERT_OK_AND_ASSIGN(LpSolution s,
                       MaximizeLp({{1, 1}, {1, 0}, {0, 1}, {1, 1}}, {1, 1, 1, 1}, {1, 1}));
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(MaximizeLpTest, UnboundedIsAnError) {
  EXPECT_FALSE(MaximizeLp({{1, -1}}, {1}, {1, 1}).ok());
}

TEST(MaximizeLpTest, RejectsShapeMismatch) {
  EXPECT_FALSE(MaximizeLp({{1, 2}}, {1, 2}, {1, 1}).ok());
}

}  // namespace
}  // namespace ldp_interact
