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

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ldp_interact/trials.h"
#include "status_macros.h"

namespace ldp_interact {
namespace {

absl::StatusOr<ViewLikelihood> LikelihoodOf(const UserView& user_view,
                                            const Registry& registry,
                                            const FiniteDist& prior) {
  ViewLikelihood lik(prior);
  for (const auto& [rid, message] : user_view) {
    if (rid < 0 || static_cast<std::size_t>(rid) >= registry.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown randomizer id ", rid));
    }
    const Randomizer& r = registry[static_cast<std::size_t>(rid)];
    const std::ptrdiff_t yi = r.RangeIndex(message);
    if (yi < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "message ", message, " is outside the range of randomizer ", rid));
    }
    LDPI_RETURN_IF_ERROR(lik.Update(r, static_cast<std::size_t>(yi)));
  }
  return lik;
}

// sum_x prior(x) p_x.
double AcceptMass(const ViewLikelihood& lik) {
  double mass = 0.0;
  const auto probs = lik.prior().probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    mass += probs[i] * lik.values()[i];
  }
  return mass;
}

}  // namespace

absl::StatusOr<RejSampResult> RejSamp(const ViewLikelihood& likelihood,
                                      double eps, const Randomizer& target,
                                      SeededRng& rng, std::int64_t max_draws) {
  const FiniteDist& prior = likelihood.prior();
  const double floor = std::exp(-eps) * (1.0 - kPrivacySlack);
  std::vector<std::size_t> target_index(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double p = likelihood.values()[i];
    if (prior.probs()[i] > 0.0 && p < floor) {
      return absl::FailedPreconditionError(absl::StrCat(
          "likelihood ratio ", p, " of datum ", prior.support()[i],
          " is below e^-eps; the view was not produced eps-privately"));
    }
    const std::ptrdiff_t xi = target.DomainIndex(prior.support()[i]);
    if (xi < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("prior symbol ", prior.support()[i],
                       " is outside the target randomizer's domain"));
    }
    target_index[i] = static_cast<std::size_t>(xi);
  }
  for (std::int64_t draws = 1; draws <= max_draws; ++draws) {
    const std::size_t i = prior.SampleIndex(rng);
    if (rng.Bernoulli(likelihood.values()[i] / 2.0)) {
      const std::size_t y = target.SampleIndex(target_index[i], rng);
      return RejSampResult{target.range()[y], draws, prior.support()[i]};
    }
  }
  return absl::ResourceExhaustedError(
      absl::StrCat("rejection sampling exceeded ", max_draws, " draws"));
}

absl::StatusOr<RejSampResult> RejSamp(const UserView& user_view,
                                      const Registry& registry,
                                      const FiniteDist& prior, double eps,
                                      const Randomizer& target, SeededRng& rng,
                                      std::int64_t max_draws) {
  LDPI_ASSIGN_OR_RETURN(ViewLikelihood lik,
                        LikelihoodOf(user_view, registry, prior));
  return RejSamp(lik, eps, target, rng, max_draws);
}

absl::StatusOr<FiniteDist> RejSampAcceptedDistribution(
    const UserView& user_view, const Registry& registry,
    const FiniteDist& prior) {
  LDPI_ASSIGN_OR_RETURN(ViewLikelihood lik,
                        LikelihoodOf(user_view, registry, prior));
  return lik.Posterior();
}

absl::StatusOr<double> RejSampExpectedDraws(const UserView& user_view,
                                            const Registry& registry,
                                            const FiniteDist& prior) {
  LDPI_ASSIGN_OR_RETURN(ViewLikelihood lik,
                        LikelihoodOf(user_view, registry, prior));
  return 2.0 / AcceptMass(lik);
}

absl::StatusOr<CompiledReduction> CompiledReduction::Create(
    const Protocol& p, double eps, const ReductionOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("eps must be positive and finite");
  }
  CompiledReduction c(p, eps, options);
  c.decompositions_.reserve(p.registry().size());
  for (const Randomizer& r : p.registry()) {
    if (r.declared_delta() != 0.0) {
      c.decompositions_.push_back(absl::InvalidArgumentError(absl::StrCat(
          "randomizer '", r.name(), "' is not pure (delta > 0)")));
    } else if (options.anchor.has_value()) {
      c.decompositions_.push_back(Decompose(r, eps, *options.anchor));
    } else {
      c.decompositions_.push_back(Decompose(r, eps));
    }
  }
  return c;
}

absl::StatusOr<ReductionRun> CompiledReduction::Run(const FiniteDist& prior,
                                                    int n,
                                                    SeededRng& rng) const {
  if (n < protocol_.n_declared()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "experiment has ", n, " users but the protocol declares ",
        protocol_.n_declared()));
  }
  ReductionRun run;
  std::vector<ViewLikelihood> views(static_cast<std::size_t>(n),
                                    ViewLikelihood(prior));
  std::vector<bool> touched(static_cast<std::size_t>(n), false);
  for (;;) {
    if (static_cast<std::int64_t>(run.transcript.size()) >=
        options_.max_rounds) {
      return absl::ResourceExhaustedError(
          absl::StrCat(protocol_.name(), ": protocol did not halt within ",
                       options_.max_rounds, " rounds"));
    }
    LDPI_ASSIGN_OR_RETURN(std::optional<Assignment> a,
                          protocol_.Next(run.transcript.rounds));
    if (!a.has_value()) break;
    const int round = static_cast<int>(run.transcript.size());
    const auto u = static_cast<std::size_t>(a->user);
    const Randomizer& r = protocol_.randomizer(a->randomizer_id);
    std::size_t y = 0;
    std::int64_t rejected = 0;
    double gamma = 1.0;
    if (!touched[u]) {
      const std::size_t i = prior.SampleIndex(rng);
      const std::ptrdiff_t xi = r.DomainIndex(prior.support()[i]);
      if (xi < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("datum ", prior.support()[i],
                         " is outside the domain of randomizer '", r.name(),
                         "'"));
      }
      y = r.SampleIndex(static_cast<std::size_t>(xi), rng);
      touched[u] = true;
      run.samples_used += 1;
      run.fresh_user_log.push_back({round, 1});
      run.branches.push_back(RoundBranch::kFirstTouch);
    } else {
      const absl::StatusOr<Decomposition>& d =
          decompositions_[static_cast<std::size_t>(a->randomizer_id)];
      if (!d.ok()) return d.status();
      gamma = d->gamma;
      if (gamma > 0.0 && rng.Uniform() < gamma) {
        LDPI_ASSIGN_OR_RETURN(
            RejSampResult rs,
            RejSamp(views[u], eps_, d->r_tilde, rng, options_.max_draws));
        y = static_cast<std::size_t>(r.RangeIndex(rs.message));
        rejected = rs.draws_used - 1;
        run.samples_used += rs.draws_used;
        run.fresh_user_log.push_back({round, rs.draws_used});
        run.branches.push_back(RoundBranch::kRejection);
      } else {
        y = d->mu.SampleIndex(rng);
        run.branches.push_back(RoundBranch::kDataIndependent);
      }
    }
    LDPI_RETURN_IF_ERROR(views[u].Update(r, y));
    run.per_round_rejections.push_back(rejected);
    run.gammas.push_back(gamma);
    run.transcript.rounds.push_back(
        {a->user, a->randomizer_id, a->eps, a->delta, r.range()[y]});
  }
  return run;
}

absl::StatusOr<ReductionRun> ReductionExpt(const Protocol& p,
                                           const FiniteDist& prior, int n,
                                           double eps, SeededRng& rng,
                                           const ReductionOptions& options) {
  LDPI_ASSIGN_OR_RETURN(CompiledReduction c,
                        CompiledReduction::Create(p, eps, options));
  return c.Run(prior, n, rng);
}

double ExpectedSampleBound(int n, double eps, double k) {
  return n * (2.0 * std::exp(eps) * eps / -std::expm1(-eps) * k + 1.0);
}

double Quantile(const std::vector<std::int64_t>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double rank = std::ceil(q * static_cast<double>(sorted.size()));
  const auto idx = static_cast<std::size_t>(
      std::clamp(rank - 1.0, 0.0, static_cast<double>(sorted.size() - 1)));
  return static_cast<double>(sorted[idx]);
}

absl::StatusOr<SampleComplexitySummary> EmpiricalSampleComplexity(
    const Protocol& p, const FiniteDist& prior, int n, double eps,
    std::int64_t trials, std::uint64_t seed, int threads,
    const ReductionOptions& options) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  LDPI_ASSIGN_OR_RETURN(CompiledReduction c,
                        CompiledReduction::Create(p, eps, options));
  auto results = RunTrials(
      trials, seed, threads,
      [&](std::int64_t, SeededRng& rng) -> absl::StatusOr<std::int64_t> {
        LDPI_ASSIGN_OR_RETURN(ReductionRun run, c.Run(prior, n, rng));
        return run.samples_used;
      });
  SampleComplexitySummary s;
  s.trials = trials;
  s.samples.reserve(results.size());
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    s.samples.push_back(*r);
  }
  double sum = 0.0;
  for (std::int64_t v : s.samples) sum += static_cast<double>(v);
  s.mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (std::int64_t v : s.samples) {
    ss += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
  }
  s.stddev = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
  std::vector<std::int64_t> sorted = s.samples;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q50 = Quantile(sorted, 0.5);
  s.q90 = Quantile(sorted, 0.9);
  s.q99 = Quantile(sorted, 0.99);
  return s;
}

}  // namespace ldp_interact
