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

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "boost/math/distributions/chi_squared.hpp"
#include "status_macros.h"

namespace ldp_interact {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(max / min) of a channel column; 0 for an impossible outcome.
double LogSpread(std::span<const double> column) {
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  if (*hi <= 0.0) return 0.0;
  if (*lo <= 0.0) return kInf;
  return std::log(*hi / *lo);
}

// Positions of `symbols` in r's domain.
absl::StatusOr<std::vector<std::size_t>> DomainPositions(
    const Randomizer& r, std::span<const Symbol> symbols) {
  std::vector<std::size_t> out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::ptrdiff_t xi = r.DomainIndex(symbols[i]);
    if (xi < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("symbol ", symbols[i], " is outside the domain of '",
                       r.name(), "'"));
    }
    out[i] = static_cast<std::size_t>(xi);
  }
  return out;
}

absl::Status Overflow(const Protocol& p, std::int64_t cap) {
  return absl::ResourceExhaustedError(
      absl::StrCat(p.name(), ": more than ", cap, " reachable transcripts"));
}

absl::Status CheckN(const Protocol& p, int n) {
  if (n < p.n_declared()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "experiment has ", n, " users but the protocol declares ",
        p.n_declared()));
  }
  return absl::OkStatus();
}

// Walks the transcript tree. `Predictive(user, rid, xs, out)` fills the
// probability of each message position given the current state and returns
// whether the round is a repeat query; the walker updates per-user
// likelihoods with R_t after each message.
class TreeWalker {
 public:
  TreeWalker(const Protocol& p, const FiniteDist& prior, int n,
             const TreeOptions& options)
      : p_(p),
        prior_(prior),
        options_(options),
        views_(static_cast<std::size_t>(n), ViewLikelihood(prior)),
        raw_(static_cast<std::size_t>(n),
             std::vector<double>(prior.size(), 1.0)),
        touched_(static_cast<std::size_t>(n), 0) {}

  virtual ~TreeWalker() = default;

  absl::Status Walk() { return Visit(1.0); }
  std::int64_t leaves() const { return leaves_; }

 protected:
  // Message law at the current node for assignment `a`.
  virtual absl::StatusOr<std::vector<double>> MessageLaw(
      const Assignment& a, std::span<const std::size_t> xs) = 0;
  virtual absl::Status OnLeaf(double prob) = 0;

  const Protocol& p_;
  const FiniteDist& prior_;
  TreeOptions options_;
  std::vector<RoundRecord> prefix_;
  std::vector<ViewLikelihood> views_;
  // Unnormalized prod_t R_t(x)(y_t) per user and prior support position.
  std::vector<std::vector<double>> raw_;
  std::vector<int> touched_;

 private:
  absl::Status Visit(double prob) {
    if (static_cast<int>(prefix_.size()) > options_.max_depth) {
      return absl::ResourceExhaustedError(absl::StrCat(
          p_.name(), ": transcript depth exceeds ", options_.max_depth));
    }
    LDPI_ASSIGN_OR_RETURN(std::optional<Assignment> next, p_.Next(prefix_));
    if (!next.has_value()) {
      if (++leaves_ > options_.max_leaves) return Overflow(p_, options_.max_leaves);
      return OnLeaf(prob);
    }
    const Assignment a = *next;
    const auto u = static_cast<std::size_t>(a.user);
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    LDPI_ASSIGN_OR_RETURN(auto xs, DomainPositions(r, prior_.support()));
    LDPI_ASSIGN_OR_RETURN(std::vector<double> law, MessageLaw(a, xs));
    for (std::size_t y = 0; y < r.range_size(); ++y) {
      if (!(law[y] > 0.0)) continue;
      const ViewLikelihood saved_view = views_[u];
      const std::vector<double> saved_raw = raw_[u];
      LDPI_RETURN_IF_ERROR(views_[u].Update(r, y));
      for (std::size_t i = 0; i < xs.size(); ++i) raw_[u][i] *= r.Prob(xs[i], y);
      ++touched_[u];
      prefix_.push_back({a.user, a.randomizer_id, a.eps, a.delta, r.range()[y]});
      absl::Status s = Visit(prob * law[y]);
      prefix_.pop_back();
      --touched_[u];
      raw_[u] = saved_raw;
      views_[u] = saved_view;
      LDPI_RETURN_IF_ERROR(s);
    }
    return absl::OkStatus();
  }

  std::int64_t leaves_ = 0;
};

// Posterior predictive sum_x post(x) R(x)(y).
std::vector<double> Predictive(const Randomizer& r, const ViewLikelihood& view,
                               std::span<const std::size_t> xs) {
  const FiniteDist post = view.Posterior();
  std::vector<double> law(r.range_size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t y = 0; y < law.size(); ++y) {
      law[y] += post.probs()[i] * r.Prob(xs[i], y);
    }
  }
  return law;
}

class DistWalker : public TreeWalker {
 public:
  DistWalker(const Protocol& p, const FiniteDist& prior, int n,
             const TreeOptions& options, Semantics semantics)
      : TreeWalker(p, prior, n, options), semantics_(semantics) {}

  TranscriptDist& dist() { return dist_; }

 protected:
  absl::StatusOr<std::vector<double>> MessageLaw(
      const Assignment& a, std::span<const std::size_t> xs) override {
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    const auto u = static_cast<std::size_t>(a.user);
    if (semantics_ == Semantics::kBayes) return Predictive(r, views_[u], xs);
    // Follow semantics only needs reachability here; the leaf carries the
    // probability.
    std::vector<double> reach(r.range_size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t y = 0; y < reach.size(); ++y) {
        reach[y] += prior_.probs()[i] * raw_[u][i] * r.Prob(xs[i], y);
      }
    }
    return reach;
  }

  absl::Status OnLeaf(double prob) override {
    if (semantics_ == Semantics::kFollow) {
      prob = 1.0;
      for (const auto& raw : raw_) {
        double marginal = 0.0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
          marginal += prior_.probs()[i] * raw[i];
        }
        prob *= marginal;
      }
    }
    dist_[TranscriptKey(prefix_)] += prob;
    return absl::OkStatus();
  }

 private:
  Semantics semantics_;
  TranscriptDist dist_;
};

class ReductionWalker : public TreeWalker {
 public:
  ReductionWalker(const CompiledReduction& c, const FiniteDist& prior, int n,
                  const TreeOptions& options)
      : TreeWalker(c.protocol(), prior, n, options), c_(c) {}

  TranscriptDist& dist() { return dist_; }

 protected:
  absl::StatusOr<std::vector<double>> MessageLaw(
      const Assignment& a, std::span<const std::size_t> xs) override {
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    const auto u = static_cast<std::size_t>(a.user);
    if (touched_[u] == 0) return Predictive(r, ViewLikelihood(prior_), xs);
    const absl::StatusOr<Decomposition>& d = c_.decomposition(a.randomizer_id);
    if (!d.ok()) return d.status();
    // Accepted datum: prior(x) p_x normalized.
    std::vector<double> accepted(xs.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      accepted[i] = prior_.probs()[i] * views_[u].values()[i];
      mass += accepted[i];
    }
    LDPI_ASSIGN_OR_RETURN(auto txs, DomainPositions(d->r_tilde, prior_.support()));
    std::vector<double> law(r.range_size(), 0.0);
    for (std::size_t y = 0; y < law.size(); ++y) {
      double tilde = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        tilde += accepted[i] / mass * d->r_tilde.Prob(txs[i], y);
      }
      law[y] = d->gamma * tilde + (1.0 - d->gamma) * d->mu.probs()[y];
    }
    return law;
  }

  absl::Status OnLeaf(double prob) override {
    dist_[TranscriptKey(prefix_)] += prob;
    return absl::OkStatus();
  }

 private:
  const CompiledReduction& c_;
  TranscriptDist dist_;
};

}  // namespace

absl::StatusOr<TranscriptDist> EnumerateTranscripts(const Protocol& p,
                                                    const FiniteDist& prior,
                                                    int n, Semantics semantics,
                                                    const TreeOptions& options) {
  LDPI_RETURN_IF_ERROR(CheckN(p, n));
  DistWalker walker(p, prior, n, options, semantics);
  LDPI_RETURN_IF_ERROR(walker.Walk());
  return std::move(walker.dist());
}

absl::StatusOr<TranscriptDist> EnumerateReductionTranscripts(
    const CompiledReduction& reduction, const FiniteDist& prior, int n,
    const TreeOptions& options) {
  LDPI_RETURN_IF_ERROR(CheckN(reduction.protocol(), n));
  ReductionWalker walker(reduction, prior, n, options);
  LDPI_RETURN_IF_ERROR(walker.Walk());
  return std::move(walker.dist());
}

absl::StatusOr<std::vector<RoundRecord>> ParseTranscriptKey(
    const std::string& key) {
  std::vector<RoundRecord> rounds;
  for (absl::string_view part : absl::StrSplit(key, ';', absl::SkipEmpty())) {
    std::vector<absl::string_view> f = absl::StrSplit(part, ':');
    RoundRecord r;
    if (f.size() != 3 || !absl::SimpleAtoi(f[0], &r.user) ||
        !absl::SimpleAtoi(f[1], &r.randomizer_id) ||
        !absl::SimpleAtoi(f[2], &r.message)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed transcript round '", part, "'"));
    }
    rounds.push_back(r);
  }
  return rounds;
}

double TotalMass(const TranscriptDist& dist) {
  double total = 0.0;
  for (const auto& [key, prob] : dist) total += prob;
  return total;
}

namespace {

class AuditWalker {
 public:
  AuditWalker(const Protocol& p, int n, std::span<const Symbol> domain,
              const TreeOptions& options)
      : p_(p),
        domain_(domain),
        options_(options),
        lik_(static_cast<std::size_t>(n),
             std::vector<double>(domain.size(), 1.0)) {}

  absl::Status Visit() {
    if (static_cast<int>(prefix_.size()) > options_.max_depth) {
      return absl::ResourceExhaustedError("transcript depth exceeded");
    }
    LDPI_ASSIGN_OR_RETURN(std::optional<Assignment> next, p_.Next(prefix_));
    if (!next.has_value()) {
      if (++report_.transcripts > options_.max_leaves) {
        return Overflow(p_, options_.max_leaves);
      }
      Score();
      return absl::OkStatus();
    }
    const Assignment a = *next;
    const auto u = static_cast<std::size_t>(a.user);
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    LDPI_ASSIGN_OR_RETURN(auto xs, DomainPositions(r, domain_));
    for (std::size_t y = 0; y < r.range_size(); ++y) {
      const std::vector<double> saved = lik_[u];
      double top = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        lik_[u][i] *= r.Prob(xs[i], y);
        top = std::max(top, lik_[u][i]);
      }
      if (top > 0.0) {
        for (double& v : lik_[u]) v /= top;
        prefix_.push_back({a.user, a.randomizer_id, a.eps, a.delta, r.range()[y]});
        absl::Status s = Visit();
        prefix_.pop_back();
        lik_[u] = saved;
        LDPI_RETURN_IF_ERROR(s);
      } else {
        lik_[u] = saved;
      }
    }
    return absl::OkStatus();
  }

  AuditReport& report() { return report_; }

 private:
  void Score() {
    for (std::size_t u = 0; u < lik_.size(); ++u) {
      const auto& l = lik_[u];
      const auto hi = std::max_element(l.begin(), l.end());
      const auto lo = std::min_element(l.begin(), l.end());
      const double ratio = *lo > 0.0 ? std::log(*hi / *lo) : kInf;
      if (ratio > report_.realized_eps || !report_.has_witness) {
        report_.realized_eps = std::max(report_.realized_eps, ratio);
        report_.has_witness = true;
        report_.witness_user = static_cast<int>(u);
        report_.witness_x = domain_[static_cast<std::size_t>(hi - l.begin())];
        report_.witness_x_prime = domain_[static_cast<std::size_t>(lo - l.begin())];
        report_.witness_transcript = TranscriptKey(prefix_);
      }
    }
  }

  const Protocol& p_;
  std::span<const Symbol> domain_;
  TreeOptions options_;
  std::vector<std::vector<double>> lik_;
  std::vector<RoundRecord> prefix_;
  AuditReport report_;
};

}  // namespace

absl::StatusOr<AuditReport> AuditProtocol(const Protocol& p, int n,
                                          std::span<const Symbol> domain,
                                          const TreeOptions& options) {
  LDPI_RETURN_IF_ERROR(CheckN(p, n));
  if (domain.empty()) return absl::InvalidArgumentError("empty data domain");
  AuditWalker walker(p, n, domain, options);
  LDPI_RETURN_IF_ERROR(walker.Visit());
  return walker.report();
}

absl::StatusOr<double> ViewLogRatio(const Protocol& p,
                                    std::span<const RoundRecord> rounds,
                                    int user, Symbol x, Symbol x_prime) {
  double log_ratio = 0.0;
  for (const RoundRecord& t : rounds) {
    if (t.user != user) continue;
    if (t.randomizer_id < 0 ||
        static_cast<std::size_t>(t.randomizer_id) >= p.registry().size()) {
      return absl::InvalidArgumentError("unknown randomizer id");
    }
    const Randomizer& r = p.randomizer(t.randomizer_id);
    const std::ptrdiff_t xi = r.DomainIndex(x);
    const std::ptrdiff_t xj = r.DomainIndex(x_prime);
    const std::ptrdiff_t y = r.RangeIndex(t.message);
    if (xi < 0 || xj < 0 || y < 0) {
      return absl::InvalidArgumentError("symbol outside randomizer tables");
    }
    const double a = r.Prob(static_cast<std::size_t>(xi), static_cast<std::size_t>(y));
    const double b = r.Prob(static_cast<std::size_t>(xj), static_cast<std::size_t>(y));
    if (b == 0.0) return a == 0.0 ? 0.0 : kInf;
    log_ratio += std::log(a / b);
  }
  return log_ratio;
}

namespace {

class ReductionAuditWalker : public TreeWalker {
 public:
  ReductionAuditWalker(const CompiledReduction& c, const FiniteDist& prior,
                       int n, const TreeOptions& options)
      : TreeWalker(c.protocol(), prior, n, options), c_(c) {}

  ReductionAuditReport& report() { return report_; }

 protected:
  absl::StatusOr<std::vector<double>> MessageLaw(
      const Assignment& a, std::span<const std::size_t> xs) override {
    if (++report_.nodes > options_.max_leaves) {
      return Overflow(p_, options_.max_leaves);
    }
    const Randomizer& r = p_.randomizer(a.randomizer_id);
    const auto u = static_cast<std::size_t>(a.user);
    std::vector<double> column(xs.size());
    if (touched_[u] == 0) {
      for (std::size_t y = 0; y < r.range_size(); ++y) {
        for (std::size_t i = 0; i < xs.size(); ++i) column[i] = r.Prob(xs[i], y);
        Note(&report_.first_touch_eps, LogSpread(column));
      }
    } else {
      const absl::StatusOr<Decomposition>& d = c_.decomposition(a.randomizer_id);
      if (!d.ok()) return d.status();
      if (d->gamma > 0.0) {
        LDPI_ASSIGN_OR_RETURN(auto txs,
                              DomainPositions(d->r_tilde, prior_.support()));
        const auto p = views_[u].values();
        for (std::size_t i = 0; i < xs.size(); ++i) column[i] = 1.0 - p[i] / 2.0;
        const double reject = LogSpread(column);
        for (std::size_t i = 0; i < xs.size(); ++i) column[i] = p[i] / 2.0;
        report_.accept_bit_eps =
            std::max({report_.accept_bit_eps, reject, LogSpread(column)});
        Note(&report_.rejection_channel_eps, reject);
        for (std::size_t y = 0; y < r.range_size(); ++y) {
          for (std::size_t i = 0; i < xs.size(); ++i) {
            column[i] = p[i] / 2.0 * d->r_tilde.Prob(txs[i], y);
          }
          Note(&report_.rejection_channel_eps, LogSpread(column));
        }
      }
    }
    return Predictive(r, views_[u], xs);
  }

  absl::Status OnLeaf(double) override { return absl::OkStatus(); }

 private:
  void Note(double* slot, double eps) {
    *slot = std::max(*slot, eps);
    if (eps > report_.realized_eps) {
      report_.realized_eps = eps;
      report_.witness_transcript = TranscriptKey(prefix_);
    }
  }

  const CompiledReduction& c_;
  ReductionAuditReport report_;
};

}  // namespace

absl::StatusOr<ReductionAuditReport> AuditReduction(
    const CompiledReduction& reduction, const FiniteDist& prior, int n,
    const TreeOptions& options) {
  LDPI_RETURN_IF_ERROR(CheckN(reduction.protocol(), n));
  ReductionAuditWalker walker(reduction, prior, n, options);
  LDPI_RETURN_IF_ERROR(walker.Walk());
  return walker.report();
}

double ChiSquarePValue(double statistic, int df) {
  if (df <= 0) return 1.0;
  if (!(statistic > 0.0)) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

absl::StatusOr<GTestResult> GTestEquivalence(const TranscriptCounts& observed,
                                             const TranscriptDist& expected,
                                             double significance,
                                             double min_expected) {
  GTestResult res;
  for (const auto& [key, count] : observed) {
    if (count < 0) return absl::InvalidArgumentError("negative count");
    res.total += count;
  }
  if (res.total < 1000) {
    return absl::InvalidArgumentError(absl::StrCat(
        "G-test needs at least 1000 observations, got ", res.total));
  }
  for (const auto& [key, count] : observed) {
    const auto it = expected.find(key);
    if (count > 0 && (it == expected.end() || !(it->second > 0.0))) {
      res.statistic = kInf;
      res.p_value = 0.0;
      res.pass = false;
      return res;
    }
  }

  struct Cell {
    double expected;
    std::int64_t observed;
  };
  std::vector<Cell> cells;
  const double total = static_cast<double>(res.total);
  for (const auto& [key, prob] : expected) {
    if (!(prob > 0.0)) continue;
    const auto it = observed.find(key);
    cells.push_back({prob * total, it == observed.end() ? 0 : it->second});
  }
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.expected < b.expected; });
  std::vector<Cell> merged;
  Cell pending{0.0, 0};
  for (const Cell& c : cells) {
    pending.expected += c.expected;
    pending.observed += c.observed;
    if (pending.expected >= min_expected) {
      merged.push_back(pending);
      pending = {0.0, 0};
    }
  }
  if (pending.expected > 0.0 || pending.observed > 0) {
    if (merged.empty()) {
      merged.push_back(pending);
    } else {
      merged.back().expected += pending.expected;
      merged.back().observed += pending.observed;
    }
  }
  res.cells = static_cast<int>(merged.size());
  res.df = res.cells - 1;
  double g = 0.0;
  for (const Cell& c : merged) {
    if (c.observed > 0) {
      g += 2.0 * static_cast<double>(c.observed) *
           std::log(static_cast<double>(c.observed) / c.expected);
    }
  }
  res.statistic = std::max(0.0, g);
  res.p_value = ChiSquarePValue(res.statistic, res.df);
  res.pass = res.p_value >= significance;
  return res;
}

}  // namespace ldp_interact
