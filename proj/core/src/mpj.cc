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

#include "ldp_interact/mpj.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ldp_interact/randomizer.h"
#include "status_macros.h"

namespace ldp_interact {
namespace {

absl::Status CheckShape(int d, std::int64_t s) {
  if (d < 1) return absl::InvalidArgumentError("MPJ depth d must be >= 1");
  if (s < 2) return absl::InvalidArgumentError("MPJ arity s must be >= 2");
  if (s > (std::int64_t{1} << 32)) {
    return absl::InvalidArgumentError("MPJ arity s must be <= 2^32");
  }
  return absl::OkStatus();
}

// s^e, or -1 once it exceeds `cap`.
std::int64_t CappedPow(std::int64_t s, std::int64_t e, std::int64_t cap) {
  std::int64_t v = 1;
  for (std::int64_t i = 0; i < e; ++i) {
    if (v > cap / s) return -1;
    v *= s;
  }
  return v;
}

// Number of ones among k fair coins.
std::int64_t FairOnes(std::int64_t k, SeededRng& rng) {
  std::int64_t ones = 0;
  for (; k >= 64; k -= 64) ones += std::popcount(rng());
  if (k > 0) ones += std::popcount(rng() & ((std::uint64_t{1} << k) - 1));
  return ones;
}

// Majority bits of one round, MSB first, clamped to s - 1.
struct RoundOutcome {
  std::uint32_t value = 0;
  bool clamped = false;
};

RoundOutcome Assemble(const std::vector<bool>& bits, std::int64_t s) {
  std::uint64_t q = 0;
  for (bool b : bits) q = (q << 1) | (b ? 1 : 0);
  RoundOutcome out;
  if (q >= static_cast<std::uint64_t>(s)) {
    out.value = static_cast<std::uint32_t>(s - 1);
    out.clamped = true;
  } else {
    out.value = static_cast<std::uint32_t>(q);
  }
  return out;
}

// One group's vote in round `level`: `holders` users report randomized
// response on `bit`, the other `group - holders` flip fair coins.
bool GroupVote(std::int64_t group, std::int64_t holders, int bit,
               double keep, SeededRng& rng) {
  std::int64_t ones = FairOnes(group - holders, rng);
  for (std::int64_t i = 0; i < holders; ++i) {
    const bool truthful = rng.Bernoulli(keep);
    ones += (truthful ? bit : 1 - bit);
  }
  return 2 * ones >= group;
}

absl::Status CheckSolve(const MpjInstance& inst, double eps, std::int64_t m) {
  LDPI_RETURN_IF_ERROR(CheckShape(inst.d, inst.s));
  if (static_cast<int>(inst.levels.size()) != inst.d ||
      static_cast<int>(inst.path.size()) != inst.d) {
    return absl::InvalidArgumentError("malformed MPJ instance");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("eps must be positive and finite");
  }
  if (m < 1) return absl::InvalidArgumentError("group size m must be >= 1");
  return absl::OkStatus();
}

}  // namespace

int MpjGroupCount(std::int64_t s) {
  int u = 0;
  while ((std::int64_t{1} << u) < s) ++u;
  return u;
}

absl::StatusOr<std::vector<std::uint32_t>> ComputeMpjPath(
    int d, std::int64_t s,
    const std::vector<std::vector<std::uint32_t>>& levels) {
  LDPI_RETURN_IF_ERROR(CheckShape(d, s));
  if (static_cast<int>(levels.size()) != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", d, " levels, got ", levels.size()));
  }
  std::uint64_t expected = 1;
  for (int i = 0; i < d; ++i) {
    if (levels[static_cast<std::size_t>(i)].size() != expected) {
      return absl::InvalidArgumentError(
          absl::StrCat("level ", i + 1, " has ", levels[i].size(),
                       " labels, expected ", expected));
    }
    for (std::uint32_t z : levels[static_cast<std::size_t>(i)]) {
      if (z >= static_cast<std::uint64_t>(s)) {
        return absl::InvalidArgumentError(
            absl::StrCat("label ", z, " at level ", i + 1, " is not < ", s));
      }
    }
    expected *= static_cast<std::uint64_t>(s);
  }
  std::vector<std::uint32_t> path(static_cast<std::size_t>(d));
  std::uint64_t index = 0;
  for (int i = 0; i < d; ++i) {
    path[static_cast<std::size_t>(i)] = levels[static_cast<std::size_t>(i)][index];
    index = index * static_cast<std::uint64_t>(s) + path[static_cast<std::size_t>(i)];
  }
  return path;
}

absl::StatusOr<MpjInstance> MakeMpjInstance(
    int d, std::int64_t s, std::vector<std::vector<std::uint32_t>> levels) {
  LDPI_ASSIGN_OR_RETURN(auto path, ComputeMpjPath(d, s, levels));
  return MpjInstance{d, s, std::move(levels), std::move(path)};
}

absl::StatusOr<MpjInstance> RandomMpjInstance(int d, std::int64_t s,
                                              SeededRng& rng,
                                              std::int64_t max_entries) {
  LDPI_RETURN_IF_ERROR(CheckShape(d, s));
  std::int64_t total = 0;
  for (int i = 0; i < d; ++i) {
    const std::int64_t size = CappedPow(s, i, max_entries);
    if (size < 0 || total + size > max_entries) {
      return absl::ResourceExhaustedError(
          absl::StrCat("MPJ tree with d=", d, ", s=", s, " exceeds ",
                       max_entries, " labels"));
    }
    total += size;
  }
  MpjInstance inst;
  inst.d = d;
  inst.s = s;
  inst.levels.resize(static_cast<std::size_t>(d));
  const bool pow2 = (s & (s - 1)) == 0;
  const int bits = std::countr_zero(static_cast<std::uint64_t>(s));
  std::size_t size = 1;
  for (auto& level : inst.levels) {
    level.resize(size);
    if (pow2) {
      // Slice each 64-bit draw into independent uniform labels.
      const int per_word = 64 / bits;
      const std::uint64_t mask = static_cast<std::uint64_t>(s) - 1;
      std::size_t j = 0;
      while (j < size) {
        std::uint64_t w = rng();
        for (int k = 0; k < per_word && j < size; ++k, ++j, w >>= bits) {
          level[j] = static_cast<std::uint32_t>(w & mask);
        }
      }
    } else {
      for (auto& z : level) {
        z = static_cast<std::uint32_t>(rng.UniformInt(static_cast<std::uint64_t>(s)));
      }
    }
    size *= static_cast<std::size_t>(s);
  }
  LDPI_ASSIGN_OR_RETURN(inst.path, ComputeMpjPath(d, s, inst.levels));
  return inst;
}

int SampleMpjLevel(int d, SeededRng& rng) {
  if (rng.Bernoulli(0.5)) return 0;
  return 1 + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(d)));
}

MpjDatum SampleMpjDatum(const MpjInstance& inst, SeededRng& rng) {
  const int level = SampleMpjLevel(inst.d, rng);
  if (level == 0) return {};
  return {level, inst.levels[static_cast<std::size_t>(level - 1)]};
}

std::int64_t DefaultMpjGroupSize(int d, double eps) {
  const double e = std::exp(eps);
  const double m = 512.0 * d * d * std::log(static_cast<double>(d)) *
                   (e + 1) * (e + 1) / ((e - 1) * (e - 1));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(m)));
}

absl::StatusOr<MpjSolveResult> SolveMpjFull(const MpjInstance& inst,
                                            double eps, std::int64_t m,
                                            SeededRng& rng) {
  LDPI_RETURN_IF_ERROR(CheckSolve(inst, eps, m));
  const int d = inst.d;
  const int u = MpjGroupCount(inst.s);
  // Users are exchangeable within a group, so only level counts matter.
  std::vector<std::int64_t> holders(static_cast<std::size_t>(u * (d + 1)), 0);
  for (int g = 0; g < u; ++g) {
    for (std::int64_t i = 0; i < m; ++i) {
      ++holders[static_cast<std::size_t>(g * (d + 1) + SampleMpjLevel(d, rng))];
    }
  }
  const double keep = std::exp(eps) / (std::exp(eps) + 1.0);
  MpjSolveResult result;
  result.n_users = static_cast<std::int64_t>(u) * m;
  result.rounds = d;
  bool clamped = false;
  std::uint64_t q = 0;
  std::vector<bool> bits(static_cast<std::size_t>(u));
  for (int r = 1; r <= d; ++r) {
    const std::uint32_t label = inst.levels[static_cast<std::size_t>(r - 1)][q];
    for (int g = 0; g < u; ++g) {
      const int bit = static_cast<int>((label >> (u - 1 - g)) & 1U);
      bits[static_cast<std::size_t>(g)] = GroupVote(
          m, holders[static_cast<std::size_t>(g * (d + 1) + r)], bit, keep, rng);
    }
    const RoundOutcome qr = Assemble(bits, inst.s);
    clamped = clamped || qr.clamped;
    result.output.push_back(qr.value);
    q = q * static_cast<std::uint64_t>(inst.s) + qr.value;
  }
  result.success = !clamped && result.output == inst.path;
  return result;
}

absl::StatusOr<MpjSolveResult> SolveMpjSequentialCohorts(
    const MpjInstance& inst, double eps, std::int64_t m, SeededRng& rng) {
  LDPI_RETURN_IF_ERROR(CheckSolve(inst, eps, m));
  const int d = inst.d;
  const int u = MpjGroupCount(inst.s);
  const std::int64_t cohort = std::max<std::int64_t>(1, m / d);
  const double keep = std::exp(eps) / (std::exp(eps) + 1.0);
  MpjSolveResult result;
  result.n_users = static_cast<std::int64_t>(u) * cohort * d;
  result.rounds = d;
  bool clamped = false;
  std::uint64_t q = 0;
  std::vector<bool> bits(static_cast<std::size_t>(u));
  for (int r = 1; r <= d; ++r) {
    const std::uint32_t label = inst.levels[static_cast<std::size_t>(r - 1)][q];
    for (int g = 0; g < u; ++g) {
      std::int64_t holders = 0;
      for (std::int64_t i = 0; i < cohort; ++i) {
        holders += SampleMpjLevel(d, rng) == r ? 1 : 0;
      }
      const int bit = static_cast<int>((label >> (u - 1 - g)) & 1U);
      bits[static_cast<std::size_t>(g)] =
          GroupVote(cohort, holders, bit, keep, rng);
    }
    const RoundOutcome qr = Assemble(bits, inst.s);
    clamped = clamped || qr.clamped;
    result.output.push_back(qr.value);
    q = q * static_cast<std::uint64_t>(inst.s) + qr.value;
  }
  result.success = !clamped && result.output == inst.path;
  return result;
}

absl::StatusOr<MpjEncoding> MpjEncoding::Create(int d, std::int64_t s,
                                                std::int64_t max_domain) {
  LDPI_RETURN_IF_ERROR(CheckShape(d, s));
  MpjEncoding e;
  e.d_ = d;
  e.s_ = s;
  e.offsets_ = {0, 1};
  for (int level = 1; level <= d; ++level) {
    const std::int64_t len = CappedPow(s, level - 1, 64);
    const std::int64_t count = len < 0 ? -1 : CappedPow(s, len, max_domain);
    if (count < 0 || e.offsets_.back() + count > max_domain) {
      return absl::ResourceExhaustedError(
          absl::StrCat("MPJ data domain for d=", d, ", s=", s, " exceeds ",
                       max_domain, " symbols"));
    }
    e.offsets_.push_back(e.offsets_.back() + count);
  }
  return e;
}

Symbol MpjEncoding::Encode(const MpjInstance& inst, int level) const {
  if (level == 0) return 0;
  std::int64_t code = 0;
  for (std::uint32_t z : inst.levels[static_cast<std::size_t>(level - 1)]) {
    code = code * s_ + z;
  }
  return static_cast<Symbol>(offsets_[static_cast<std::size_t>(level)] + code);
}

int MpjEncoding::LevelOf(Symbol code) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(),
                                   static_cast<std::int64_t>(code));
  return static_cast<int>(it - offsets_.begin()) - 1;
}

std::uint32_t MpjEncoding::Label(Symbol code, std::int64_t index) const {
  const int level = LevelOf(code);
  const std::int64_t len = CappedPow(s_, level - 1, 64);
  std::int64_t v = code - offsets_[static_cast<std::size_t>(level)];
  for (std::int64_t i = index + 1; i < len; ++i) v /= s_;
  return static_cast<std::uint32_t>(v % s_);
}

absl::StatusOr<Protocol> MpjFullProtocol(int d, std::int64_t s,
                                         std::int64_t m, double eps,
                                         std::int64_t max_domain) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("eps must be positive and finite");
  }
  if (m < 1) return absl::InvalidArgumentError("group size m must be >= 1");
  LDPI_ASSIGN_OR_RETURN(MpjEncoding enc, MpjEncoding::Create(d, s, max_domain));
  const int u = MpjGroupCount(s);
  const std::int64_t n = u * m;
  if (n > 4096) return absl::InvalidArgumentError("too many users for MPJ");

  const std::int64_t domain = enc.domain_size();
  std::vector<Symbol> symbols(static_cast<std::size_t>(domain));
  for (std::int64_t x = 0; x < domain; ++x) {
    symbols[static_cast<std::size_t>(x)] = static_cast<Symbol>(x);
  }
  const double keep = std::exp(eps) / (std::exp(eps) + 1.0);
  auto registry = std::make_shared<Registry>();
  std::vector<std::int64_t> base;
  std::int64_t cells = 0;
  for (int r = 1; r <= d; ++r) {
    base.push_back(static_cast<std::int64_t>(registry->size()));
    const std::int64_t positions = CappedPow(s, r - 1, max_domain);
    cells += positions * u * domain;
    if (positions < 0 || cells > (std::int64_t{1} << 24)) {
      return absl::ResourceExhaustedError("MPJ randomizer family too large");
    }
    for (std::int64_t q = 0; q < positions; ++q) {
      for (int g = 0; g < u; ++g) {
        std::vector<std::vector<double>> rows;
        rows.reserve(symbols.size());
        for (Symbol x : symbols) {
          if (enc.LevelOf(x) != r) {
            rows.push_back({0.5, 0.5});
            continue;
          }
          const int bit = static_cast<int>((enc.Label(x, q) >> (u - 1 - g)) & 1U);
          rows.push_back(bit == 1 ? std::vector<double>{1 - keep, keep}
                                  : std::vector<double>{keep, 1 - keep});
        }
        LDPI_ASSIGN_OR_RETURN(
            Randomizer rr,
            Randomizer::Create(symbols, {0, 1}, std::move(rows), eps, 0.0,
                               absl::StrCat("mpj_r", r, "_q", q, "_g", g)));
        registry->push_back(std::move(rr));
      }
    }
  }
  std::vector<double> cost;
  for (const Randomizer& r : *registry) cost.push_back(MinimalEps(r));

  StepFn step = [d, s, u, m, base, cost](std::span<const RoundRecord> t)
      -> std::optional<Assignment> {
    const std::int64_t per_round = u * m;
    const auto pos = static_cast<std::int64_t>(t.size());
    if (pos >= d * per_round) return std::nullopt;
    const std::int64_t r = pos / per_round;
    const std::int64_t g = (pos % per_round) / m;
    const std::int64_t i = pos % m;
    std::int64_t q = 0;
    std::vector<bool> bits(static_cast<std::size_t>(u));
    for (std::int64_t rr = 0; rr < r; ++rr) {
      for (std::int64_t gg = 0; gg < u; ++gg) {
        std::int64_t ones = 0;
        for (std::int64_t ii = 0; ii < m; ++ii) {
          ones += t[static_cast<std::size_t>((rr * u + gg) * m + ii)].message;
        }
        bits[static_cast<std::size_t>(gg)] = 2 * ones >= m;
      }
      q = q * s + Assemble(bits, s).value;
    }
    const std::int64_t id = base[static_cast<std::size_t>(r)] + q * u + g;
    return Assignment{static_cast<int>(g * m + i), static_cast<int>(id),
                      cost[static_cast<std::size_t>(id)], 0.0};
  };
  return Protocol::Create("mpj_full", static_cast<int>(n), std::move(registry),
                          std::move(step), eps);
}

absl::StatusOr<FiniteDist> MpjPrior(const MpjInstance& inst,
                                    std::int64_t max_domain) {
  LDPI_ASSIGN_OR_RETURN(MpjEncoding enc,
                        MpjEncoding::Create(inst.d, inst.s, max_domain));
  std::vector<Symbol> support{0};
  std::vector<double> probs{0.5};
  for (int level = 1; level <= inst.d; ++level) {
    support.push_back(enc.Encode(inst, level));
    probs.push_back(0.5 / inst.d);
  }
  return FiniteDist::Create(std::move(support), std::move(probs));
}

absl::StatusOr<double> CompositionalityOfMpj(int d, double eps) {
  LDPI_ASSIGN_OR_RETURN(Protocol p, MpjFullProtocol(d, 2, 1, eps));
  LDPI_ASSIGN_OR_RETURN(MpjEncoding enc,
                        MpjEncoding::Create(d, 2, kMpjMaxDomain));
  const FiniteDist prior =
      FiniteDist::Uniform(static_cast<std::size_t>(enc.domain_size()));
  LDPI_ASSIGN_OR_RETURN(CompositionReport report,
                        Classify(p, prior, p.n_declared(), eps));
  return report.k_worst;
}

}  // namespace ldp_interact
