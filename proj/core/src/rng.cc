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

namespace ldp_interact {

std::uint64_t SeededRng::UniformInt(std::uint64_t bound) {
  if (bound <= 1) return 0;
  unsigned __int128 product =
      static_cast<unsigned __int128>((*this)()) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double SeededRng::Laplace(double scale) {
  // u in (-1/2, 1/2]; sign(u) * scale * -ln(1 - 2|u|) with 1 - 2|u| in (0, 1].
  const double u = UniformOpenZero() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  if (!std::isfinite(magnitude)) return u < 0 ? -1e300 : 1e300;
  return u < 0 ? -magnitude : magnitude;
}

}  // namespace ldp_interact
