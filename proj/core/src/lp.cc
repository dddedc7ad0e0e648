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

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "absl/strings/str_cat.h"

namespace ldp_interact {
namespace {
constexpr double kPivotEps = 1e-12;
}  // namespace

absl::StatusOr<LpSolution> MaximizeLp(const std::vector<std::vector<double>>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      int max_iterations) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) return absl::InvalidArgumentError("A and b disagree");
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", i, " of A has ", a[i].size(), " entries"));
    }
    if (!(b[i] >= 0.0)) {
      return absl::InvalidArgumentError("b must be nonnegative");
    }
  }

  // Tableau rows 0..m-1 are constraints, row m is the reduced-cost row;
  // columns 0..n-1 structural, n..n+m-1 slack, n+m the right-hand side.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = c[j];

  LpSolution sol;
  for (;;) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] > kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    if (sol.iterations++ >= max_iterations) {
      return absl::ResourceExhaustedError("simplex iteration limit reached");
    }
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= kPivotEps) continue;
      const double ratio = t[i][cols - 1] / t[i][enter];
      if (leave == m || ratio < best - kPivotEps ||
          (ratio <= best + kPivotEps && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return absl::FailedPreconditionError("LP is unbounded");

    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t[i][cols - 1];
  }
  sol.duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.duals[i] = std::max(0.0, -t[m][n + i]);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += c[j] * sol.x[j];
  return sol;
}

}  // namespace ldp_interact
