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

#ifndef LDP_INTERACT_LP_H_
#define LDP_INTERACT_LP_H_

#include <vector>

#include "absl/status/statusor.h"

namespace ldp_interact {

struct LpSolution {
  std::vector<double> x;
  // Optimal dual multipliers, one per constraint row.
  std::vector<double> duals;
  double objective = 0.0;
  int iterations = 0;
};

// Dense simplex with Bland's rule for
//   maximize c.x  subject to  A x <= b,  x >= 0,
// with b >= 0 so the slack basis is feasible. InvalidArgument on shape
// errors or negative b; FailedPrecondition when unbounded;
// ResourceExhausted after `max_iterations` pivots.
absl::StatusOr<LpSolution> MaximizeLp(const std::vector<std::vector<double>>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      int max_iterations = 100000);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_LP_H_
