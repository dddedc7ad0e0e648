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

#include "cli.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "ldp_interact/builtin_protocols.h"
#include "ldp_interact/hypotest.h"
#include "ldp_interact/json_io.h"
#include "ldp_interact/mpj.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/reduction.h"
#include "ldp_interact/trials.h"
#include "ldp_interact/verify.h"

namespace ldp_interact::cli {
namespace {

#define CLI_RETURN_IF_ERROR(expr)           \
  do {                                      \
    ::absl::Status _cli_status = (expr);    \
    if (!_cli_status.ok()) return _cli_status; \
  } while (0)

#define CLI_CONCAT_INNER(a, b) a##b
#define CLI_CONCAT(a, b) CLI_CONCAT_INNER(a, b)
#define CLI_ASSIGN_OR_RETURN(lhs, expr) \
  CLI_ASSIGN_OR_RETURN_IMPL(CLI_CONCAT(_cli_or_, __LINE__), lhs, expr)
#define CLI_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                              \
  if (!tmp.ok()) return tmp.status();             \
  lhs = *std::move(tmp)

const std::set<std::string> kSubcommands = {"reduce", "mpj", "hypotest",
                                            "audit", "enumerate"};

const std::map<std::string, std::set<std::string>>& ParamSchemas() {
  static const auto* schemas = new std::map<std::string, std::set<std::string>>{
      {"reduce", {"protocol", "n", "eps", "anchor"}},
      {"mpj", {"d", "s", "eps", "m", "baseline"}},
      {"hypotest",
       {"mode", "p0", "p1", "instance", "eps", "alpha", "n", "auto_n", "tol"}},
      {"audit", {"protocol", "n", "max_leaves"}},
      {"enumerate", {"protocol", "semantics", "n", "max_leaves"}},
  };
  return *schemas;
}

absl::Status Invalid(absl::string_view where, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

// Typed parameter access with defaults.
class Params {
 public:
  explicit Params(OrderedJson* p) : p_(p) {}

  absl::StatusOr<std::int64_t> Int(const std::string& key,
                                   std::optional<std::int64_t> fallback,
                                   std::int64_t min_value) {
    if (!p_->contains(key)) {
      if (!fallback.has_value()) return Invalid(key, "required parameter missing");
      (*p_)[key] = *fallback;
    }
    const OrderedJson& v = (*p_)[key];
    if (!v.is_number_integer()) return Invalid(key, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < min_value) return Invalid(key, absl::StrCat("must be >= ", min_value));
    return x;
  }

  absl::StatusOr<double> Number(const std::string& key,
                                std::optional<double> fallback) {
    if (!p_->contains(key)) {
      if (!fallback.has_value()) return Invalid(key, "required parameter missing");
      (*p_)[key] = *fallback;
    }
    const OrderedJson& v = (*p_)[key];
    if (!v.is_number()) return Invalid(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) return Invalid(key, "must be finite");
    return x;
  }

  absl::StatusOr<double> PositiveNumber(const std::string& key,
                                        std::optional<double> fallback) {
    CLI_ASSIGN_OR_RETURN(double x, Number(key, fallback));
    if (!(x > 0.0)) return Invalid(key, "must be > 0");
    return x;
  }

  absl::StatusOr<std::string> String(const std::string& key,
                                     std::optional<std::string> fallback,
                                     const std::set<std::string>& choices = {}) {
    if (!p_->contains(key)) {
      if (!fallback.has_value()) return Invalid(key, "required parameter missing");
      (*p_)[key] = *fallback;
    }
    const OrderedJson& v = (*p_)[key];
    if (!v.is_string()) return Invalid(key, "expected a string");
    std::string s = v.get<std::string>();
    if (!choices.empty() && !choices.count(s)) {
      return Invalid(key, absl::StrCat("must be one of ", absl::StrJoin(choices, ", ")));
    }
    return s;
  }

  absl::StatusOr<bool> Bool(const std::string& key, bool fallback) {
    if (!p_->contains(key)) (*p_)[key] = fallback;
    const OrderedJson& v = (*p_)[key];
    if (!v.is_boolean()) return Invalid(key, "expected true or false");
    return v.get<bool>();
  }

  absl::StatusOr<std::vector<double>> Numbers(const std::string& key) {
    if (!p_->contains(key)) return Invalid(key, "required parameter missing");
    const OrderedJson& v = (*p_)[key];
    if (!v.is_array()) return Invalid(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) return Invalid(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  bool Has(const std::string& key) const { return p_->contains(key); }

 private:
  OrderedJson* p_;
};

void DumpTo(const OrderedJson& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case OrderedJson::value_t::number_float:
      out += FormatDouble(v.get<double>());
      return;
    case OrderedJson::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += indent < 0 ? "," : ",";
        first = false;
        newline(depth + 1);
        DumpTo(e, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case OrderedJson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, e] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += OrderedJson(key).dump();
        out += indent < 0 ? ":" : ": ";
        DumpTo(e, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += v.dump();
  }
}

absl::Status WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path.string()));
  out << text;
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  return absl::OkStatus();
}

struct Outputs {
  std::vector<OrderedJson> records;
  std::vector<std::string> summary_header;
  std::vector<std::string> summary_row;
  // Extra report files: name -> document.
  std::vector<std::pair<std::string, OrderedJson>> reports;
};

std::string Cell(double v) { return FormatDouble(v); }
std::string Cell(std::int64_t v) { return absl::StrCat(v); }

// Loading errors are input errors regardless of their code.
absl::StatusOr<LoadedProtocol> LoadProtocol(const std::string& path) {
  absl::StatusOr<LoadedProtocol> lp = LoadProtocolFile(path);
  if (!lp.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", lp.status().message()));
  }
  return lp;
}

// Runs `trials` of fn with derived seeds and returns the records in order.
template <typename Fn>
absl::StatusOr<std::vector<OrderedJson>> CollectTrials(const ExperimentConfig& c,
                                                       Fn&& fn) {
  auto results = RunTrials(
      c.trials, c.seed, ThreadCountFromEnv(),
      [&](std::int64_t t, SeededRng& rng) -> absl::StatusOr<OrderedJson> {
        CLI_ASSIGN_OR_RETURN(OrderedJson rec, fn(t, rng));
        OrderedJson out = OrderedJson::object();
        out["trial"] = t;
        out["seed"] = DeriveSeed(c.seed, static_cast<std::uint64_t>(t));
        for (auto& [k, v] : rec.items()) out[k] = v;
        return out;
      });
  std::vector<OrderedJson> records;
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    records.push_back(*std::move(r));
  }
  return records;
}

absl::Status RunReduce(ExperimentConfig& c, Outputs& out) {
  Params p(&c.params);
  CLI_ASSIGN_OR_RETURN(std::string path, p.String("protocol", std::nullopt));
  CLI_ASSIGN_OR_RETURN(LoadedProtocol lp, LoadProtocol(path));
  CLI_ASSIGN_OR_RETURN(std::int64_t n, p.Int("n", lp.instance.n, 0));
  CLI_ASSIGN_OR_RETURN(double eps, p.PositiveNumber("eps", lp.eps));
  ReductionOptions options;
  if (p.Has("anchor") || lp.anchor.has_value()) {
    CLI_ASSIGN_OR_RETURN(std::int64_t a, p.Int("anchor", lp.anchor, INT32_MIN));
    options.anchor = static_cast<Symbol>(a);
  }
  CLI_ASSIGN_OR_RETURN(CompiledReduction red,
                       CompiledReduction::Create(lp.instance.protocol, eps, options));
  const int users = static_cast<int>(n);
  CLI_ASSIGN_OR_RETURN(
      out.records,
      CollectTrials(c, [&](std::int64_t, SeededRng& rng) -> absl::StatusOr<OrderedJson> {
        CLI_ASSIGN_OR_RETURN(ReductionRun run, red.Run(lp.instance.prior, users, rng));
        OrderedJson rec = OrderedJson::object();
        rec["samples_used"] = run.samples_used;
        rec["rounds"] = run.transcript.size();
        rec["transcript_hash"] = Fnv1aHex(TranscriptKey(run.transcript));
        return rec;
      }));
  std::vector<std::int64_t> samples;
  double sum = 0.0;
  for (const auto& r : out.records) {
    samples.push_back(r["samples_used"].get<std::int64_t>());
    sum += static_cast<double>(samples.back());
  }
  const double mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (auto v : samples) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  std::sort(samples.begin(), samples.end());
  TreeOptions tree;
  tree.max_leaves = 200000;
  absl::StatusOr<CompositionReport> report =
      Classify(lp.instance.protocol, lp.instance.prior, users, eps, tree);
  out.summary_header = {"subcommand", "protocol", "trials", "n", "eps",
                        "mean_samples_used", "stddev", "q50", "q90", "q99",
                        "min", "max", "k_worst", "expected_bound"};
  out.summary_row = {
      "reduce", lp.instance.protocol.name(), Cell(c.trials), Cell(n), Cell(eps), Cell(mean),
      Cell(samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0),
      Cell(Quantile(samples, 0.5)), Cell(Quantile(samples, 0.9)),
      Cell(Quantile(samples, 0.99)), Cell(samples.front()), Cell(samples.back()),
      report.ok() ? Cell(report->k_worst) : "",
      report.ok() ? Cell(ExpectedSampleBound(users, eps, report->k_worst)) : ""};
  return absl::OkStatus();
}

absl::Status RunMpj(ExperimentConfig& c, Outputs& out) {
  Params p(&c.params);
  CLI_ASSIGN_OR_RETURN(std::int64_t d, p.Int("d", std::nullopt, 1));
  if (d > 64) return Invalid("d", "must be <= 64");
  std::int64_t s_default = 1;
  for (int i = 0; i < 4 && s_default < (std::int64_t{1} << 32); ++i) s_default *= d;
  CLI_ASSIGN_OR_RETURN(std::int64_t s, p.Int("s", std::max<std::int64_t>(2, s_default), 2));
  CLI_ASSIGN_OR_RETURN(double eps, p.PositiveNumber("eps", std::nullopt));
  CLI_ASSIGN_OR_RETURN(std::int64_t m,
                       p.Int("m", DefaultMpjGroupSize(static_cast<int>(d), eps), 1));
  CLI_ASSIGN_OR_RETURN(std::string baseline,
                       p.String("baseline", "none", {"none", "sequential-cohorts"}));
  const bool with_baseline = baseline == "sequential-cohorts";
  CLI_ASSIGN_OR_RETURN(
      out.records,
      CollectTrials(c, [&](std::int64_t, SeededRng& rng) -> absl::StatusOr<OrderedJson> {
        CLI_ASSIGN_OR_RETURN(MpjInstance inst,
                             RandomMpjInstance(static_cast<int>(d), s, rng));
        CLI_ASSIGN_OR_RETURN(MpjSolveResult full, SolveMpjFull(inst, eps, m, rng));
        OrderedJson rec = OrderedJson::object();
        rec["success"] = full.success;
        rec["n_users"] = full.n_users;
        rec["rounds"] = full.rounds;
        rec["output"] = full.output;
        rec["path"] = inst.path;
        if (with_baseline) {
          CLI_ASSIGN_OR_RETURN(MpjSolveResult seq,
                               SolveMpjSequentialCohorts(inst, eps, m, rng));
          rec["baseline_success"] = seq.success;
          rec["baseline_n_users"] = seq.n_users;
        }
        return rec;
      }));
  double wins = 0.0, base_wins = 0.0;
  for (const auto& r : out.records) {
    wins += r["success"].get<bool>() ? 1.0 : 0.0;
    if (with_baseline) base_wins += r["baseline_success"].get<bool>() ? 1.0 : 0.0;
  }
  const double trials = static_cast<double>(out.records.size());
  out.summary_header = {"subcommand", "d", "s", "eps", "m", "n_users", "trials",
                        "success_rate", "target_rate", "baseline",
                        "baseline_success_rate"};
  out.summary_row = {"mpj", Cell(d), Cell(s), Cell(eps), Cell(m),
                     Cell(static_cast<std::int64_t>(MpjGroupCount(s)) * m),
                     Cell(c.trials), Cell(wins / trials),
                     Cell(1.0 - 1.0 / static_cast<double>(d)), baseline,
                     with_baseline ? Cell(base_wins / trials) : ""};
  return absl::OkStatus();
}

absl::StatusOr<FiniteDist> DistFromJson(const OrderedJson& v, absl::string_view key) {
  if (!v.is_array()) return Invalid(key, "expected an array of probabilities");
  std::vector<double> probs;
  for (const auto& e : v) {
    if (!e.is_number()) return Invalid(key, "expected an array of probabilities");
    probs.push_back(e.get<double>());
  }
  absl::StatusOr<FiniteDist> d = FiniteDist::FromProbs(std::move(probs));
  if (!d.ok()) return Invalid(key, d.status().message());
  return d;
}

absl::StatusOr<CompoundInstance> LoadCompound(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return Invalid(path, text.status().message());
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(*text);
  } catch (const OrderedJson::parse_error& e) {
    return Invalid(path, absl::StrCat(LineColumn(*text, e.byte > 0 ? e.byte - 1 : 0),
                                      ": ", e.what()));
  }
  for (const auto& [key, v] : doc.items()) {
    if (key != "ground_set" && key != "h0" && key != "h1") {
      return Invalid(path, absl::StrCat("line ", LineOfKey(*text, key),
                                        ": unknown key '", key, "'"));
    }
  }
  if (!doc.contains("h0") || !doc.contains("h1") || !doc["h0"].is_array() ||
      !doc["h1"].is_array()) {
    return Invalid(path, "needs arrays 'h0' and 'h1' of probability vectors");
  }
  std::vector<FiniteDist> h0, h1;
  for (const auto& v : doc["h0"]) {
    CLI_ASSIGN_OR_RETURN(FiniteDist d, DistFromJson(v, "h0"));
    h0.push_back(std::move(d));
  }
  for (const auto& v : doc["h1"]) {
    CLI_ASSIGN_OR_RETURN(FiniteDist d, DistFromJson(v, "h1"));
    h1.push_back(std::move(d));
  }
  std::vector<Symbol> ground;
  if (doc.contains("ground_set")) {
    for (const auto& e : doc["ground_set"]) {
      if (!e.is_number_integer()) return Invalid("ground_set", "expected integers");
      ground.push_back(e.get<Symbol>());
    }
  } else {
    std::size_t k = 0;
    for (const auto& d : h0) k = std::max(k, d.size());
    for (const auto& d : h1) k = std::max(k, d.size());
    for (std::size_t i = 0; i < k; ++i) ground.push_back(static_cast<Symbol>(i));
  }
  absl::StatusOr<CompoundInstance> inst =
      CompoundInstance::Create(std::move(ground), std::move(h0), std::move(h1));
  if (!inst.ok()) return Invalid(path, inst.status().message());
  return inst;
}

absl::Status RunHypotest(ExperimentConfig& c, Outputs& out) {
  Params p(&c.params);
  CLI_ASSIGN_OR_RETURN(std::string mode,
                       p.String("mode", "simple", {"simple", "compound"}));
  CLI_ASSIGN_OR_RETURN(double eps, p.PositiveNumber("eps", std::nullopt));
  CLI_ASSIGN_OR_RETURN(bool auto_n, p.Bool("auto_n", !p.Has("n")));
  const int threads = ThreadCountFromEnv();

  std::optional<SimpleTestInstance> simple;
  std::optional<CompoundInstance> compound;
  std::optional<EventDistribution> events;
  double alpha = 0.0;
  if (mode == "simple") {
    CLI_ASSIGN_OR_RETURN(auto p0v, p.Numbers("p0"));
    CLI_ASSIGN_OR_RETURN(auto p1v, p.Numbers("p1"));
    absl::StatusOr<FiniteDist> p0 = FiniteDist::FromProbs(p0v);
    absl::StatusOr<FiniteDist> p1 = FiniteDist::FromProbs(p1v);
    if (!p0.ok()) return Invalid("p0", p0.status().message());
    if (!p1.ok()) return Invalid("p1", p1.status().message());
    absl::StatusOr<SimpleTestInstance> inst = SimpleTestInstance::Create(*p0, *p1);
    if (!inst.ok()) return Invalid("p0/p1", inst.status().message());
    simple = *std::move(inst);
    CLI_ASSIGN_OR_RETURN(alpha, p.PositiveNumber("alpha", simple->alpha));
  } else {
    CLI_ASSIGN_OR_RETURN(std::string path, p.String("instance", std::nullopt));
    CLI_ASSIGN_OR_RETURN(compound, LoadCompound(path));
    CLI_ASSIGN_OR_RETURN(double tol, p.PositiveNumber("tol", 1e-6));
    CLI_ASSIGN_OR_RETURN(events, SolveEventGame(*compound, tol));
    compound->alpha = events->value;
    CLI_ASSIGN_OR_RETURN(alpha, p.PositiveNumber("alpha", events->value));
    OrderedJson ev = OrderedJson::object();
    ev["value"] = events->value;
    ev["upper_bound"] = events->upper_bound;
    ev["threshold"] = CompoundThreshold(*compound, *events);
    ev["ground_set"] = compound->ground_set;
    ev["scores"] = events->scores;
    OrderedJson list = OrderedJson::array();
    for (std::size_t i = 0; i < events->events.size(); ++i) {
      list.push_back({{"event", events->events[i]}, {"weight", events->weights[i]}});
    }
    ev["events"] = std::move(list);
    out.reports.emplace_back("event_distribution.json", std::move(ev));
  }

  auto success_at = [&](std::int64_t n) -> absl::StatusOr<double> {
    if (simple) return SimpleTestSuccessRate(*simple, eps, n, c.trials, c.seed, threads);
    return CompoundTestSuccessRate(*compound, *events, eps, n, c.trials, c.seed, threads);
  };
  std::int64_t n = 0;
  std::string c_used;
  std::string quarter_rate;
  if (auto_n) {
    CLI_ASSIGN_OR_RETURN(Calibration cal, CalibrateSampleConstant(eps, alpha, success_at));
    n = cal.n;
    c_used = Cell(cal.c);
    if (cal.found) quarter_rate = Cell(cal.success_quarter);
    c.params["n"] = n;
  } else {
    CLI_ASSIGN_OR_RETURN(n, p.Int("n", std::nullopt, 1));
  }

  CLI_ASSIGN_OR_RETURN(
      out.records,
      CollectTrials(c, [&](std::int64_t t, SeededRng& rng) -> absl::StatusOr<OrderedJson> {
        const int truth = static_cast<int>(t % 2);
        int decision = 0;
        if (simple) {
          CLI_ASSIGN_OR_RETURN(decision, SimpleTest(*simple, eps, n, truth, rng));
        } else {
          const auto& hull = truth == 0 ? compound->h0 : compound->h1;
          const FiniteDist& dist = hull[static_cast<std::size_t>(t / 2) % hull.size()];
          CLI_ASSIGN_OR_RETURN(decision, CompoundTest(*compound, *events, eps, n, dist, rng));
        }
        OrderedJson rec = OrderedJson::object();
        rec["truth"] = truth;
        rec["decision"] = decision;
        rec["correct"] = decision == truth;
        return rec;
      }));
  double wins = 0.0;
  for (const auto& r : out.records) wins += r["correct"].get<bool>() ? 1.0 : 0.0;
  out.summary_header = {"subcommand", "mode", "eps", "alpha", "n", "c",
                        "trials", "success_rate", "success_rate_quarter_n"};
  out.summary_row = {"hypotest", mode, Cell(eps), Cell(alpha), Cell(n), c_used,
                     Cell(c.trials), Cell(wins / static_cast<double>(out.records.size())),
                     quarter_rate};
  return absl::OkStatus();
}

absl::Status RunAudit(ExperimentConfig& c, Outputs& out) {
  Params p(&c.params);
  CLI_ASSIGN_OR_RETURN(std::string path, p.String("protocol", std::nullopt));
  CLI_ASSIGN_OR_RETURN(LoadedProtocol lp, LoadProtocol(path));
  CLI_ASSIGN_OR_RETURN(std::int64_t n, p.Int("n", lp.instance.n, 0));
  TreeOptions tree;
  CLI_ASSIGN_OR_RETURN(tree.max_leaves, p.Int("max_leaves", tree.max_leaves, 1));
  const Protocol& proto = lp.instance.protocol;
  CLI_ASSIGN_OR_RETURN(AuditReport report,
                       AuditProtocol(proto, static_cast<int>(n), lp.domain, tree));
  OrderedJson doc = OrderedJson::object();
  doc["protocol"] = proto.name();
  doc["declared_eps"] = lp.eps;
  doc["realized_eps"] = report.realized_eps;
  doc["transcripts"] = report.transcripts;
  if (report.has_witness) {
    doc["witness"] = {{"user", report.witness_user},
                      {"x", report.witness_x},
                      {"x_prime", report.witness_x_prime},
                      {"transcript", report.witness_transcript}};
  }
  std::string reduction_eps;
  if (lp.wrap_reduction) {
    ReductionOptions options;
    options.anchor = lp.anchor;
    CLI_ASSIGN_OR_RETURN(CompiledReduction red,
                         CompiledReduction::Create(proto, lp.eps, options));
    CLI_ASSIGN_OR_RETURN(FiniteDist worst,
                         FiniteDist::Create(lp.domain,
                                            std::vector<double>(lp.domain.size(),
                                                                1.0 / static_cast<double>(lp.domain.size()))));
    CLI_ASSIGN_OR_RETURN(ReductionAuditReport r,
                         AuditReduction(red, worst, static_cast<int>(n), tree));
    doc["reduction"] = {{"realized_eps", r.realized_eps},
                        {"accept_bit_eps", r.accept_bit_eps},
                        {"rejection_channel_eps", r.rejection_channel_eps},
                        {"first_touch_eps", r.first_touch_eps},
                        {"bound", 3.0 * lp.eps},
                        {"witness_transcript", r.witness_transcript},
                        {"nodes", r.nodes}};
    reduction_eps = Cell(r.realized_eps);
  }
  out.records.push_back(doc);
  out.reports.emplace_back("audit.json", doc);
  out.summary_header = {"subcommand", "protocol", "n", "declared_eps",
                        "realized_eps", "transcripts", "reduction_realized_eps"};
  out.summary_row = {"audit", proto.name(), Cell(n), Cell(lp.eps),
                     Cell(report.realized_eps), Cell(report.transcripts), reduction_eps};
  return absl::OkStatus();
}

absl::Status RunEnumerate(ExperimentConfig& c, Outputs& out) {
  Params p(&c.params);
  CLI_ASSIGN_OR_RETURN(std::string path, p.String("protocol", std::nullopt));
  CLI_ASSIGN_OR_RETURN(std::string semantics,
                       p.String("semantics", "follow", {"follow", "bayes", "reduction"}));
  CLI_ASSIGN_OR_RETURN(LoadedProtocol lp, LoadProtocol(path));
  CLI_ASSIGN_OR_RETURN(std::int64_t n, p.Int("n", lp.instance.n, 0));
  TreeOptions tree;
  CLI_ASSIGN_OR_RETURN(tree.max_leaves, p.Int("max_leaves", tree.max_leaves, 1));
  const int users = static_cast<int>(n);
  TranscriptDist dist;
  if (semantics == "reduction") {
    ReductionOptions options;
    options.anchor = lp.anchor;
    CLI_ASSIGN_OR_RETURN(CompiledReduction red,
                         CompiledReduction::Create(lp.instance.protocol, lp.eps, options));
    CLI_ASSIGN_OR_RETURN(dist, EnumerateReductionTranscripts(red, lp.instance.prior, users, tree));
  } else {
    CLI_ASSIGN_OR_RETURN(
        dist, EnumerateTranscripts(lp.instance.protocol, lp.instance.prior, users,
                                   semantics == "follow" ? Semantics::kFollow
                                                         : Semantics::kBayes,
                                   tree));
  }
  OrderedJson table = OrderedJson::object();
  for (const auto& [key, prob] : dist) {
    table[key] = prob;
    out.records.push_back({{"transcript", key}, {"prob", prob}});
  }
  OrderedJson doc = OrderedJson::object();
  doc["protocol"] = lp.instance.protocol.name();
  doc["semantics"] = semantics;
  doc["total_mass"] = TotalMass(dist);
  doc["transcripts"] = std::move(table);
  out.reports.emplace_back("transcripts.json", std::move(doc));
  out.summary_header = {"subcommand", "protocol", "semantics", "n", "transcripts",
                        "total_mass"};
  out.summary_row = {"enumerate", lp.instance.protocol.name(), semantics, Cell(n),
                     Cell(static_cast<std::int64_t>(dist.size())), Cell(TotalMass(dist))};
  return absl::OkStatus();
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

OrderedJson ConfigToJson(const ExperimentConfig& c) {
  OrderedJson j = OrderedJson::object();
  j["subcommand"] = c.subcommand;
  j["params"] = c.params;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace

std::string DumpJson(const OrderedJson& value, int indent) {
  std::string out;
  DumpTo(value, indent, 0, out);
  return out;
}

std::string Fnv1aHex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  if (absl::IsInvalidArgument(status) || absl::IsNotFound(status) ||
      absl::IsOutOfRange(status)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text,
                                             std::string_view source_view) {
  const std::string source(source_view);
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(text.begin(), text.end());
  } catch (const OrderedJson::parse_error& e) {
    return Invalid(source, absl::StrCat(LineColumn(text, e.byte > 0 ? e.byte - 1 : 0),
                                        ": malformed JSON (", e.what(), ")"));
  }
  if (!doc.is_object()) return Invalid(source, "line 1: config must be a JSON object");
  const auto where = [&](const std::string& key) {
    return absl::StrCat(source, ": line ",
                        LineOfKey(text, key));
  };
  ExperimentConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "subcommand") {
      if (!v.is_string()) return Invalid(where(key), "'subcommand' must be a string");
      c.subcommand = v.get<std::string>();
    } else if (key == "params") {
      if (!v.is_object()) return Invalid(where(key), "'params' must be an object");
      c.params = v;
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        return Invalid(where(key), "'seed' must be a non-negative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (key == "trials") {
      if (!v.is_number_integer()) return Invalid(where(key), "'trials' must be an integer");
      c.trials = v.get<std::int64_t>();
    } else if (key == "output_dir") {
      if (!v.is_string()) return Invalid(where(key), "'output_dir' must be a string");
      c.output_dir = v.get<std::string>();
    } else {
      return Invalid(where(key), absl::StrCat(
          "unknown key '", key, "'; allowed: subcommand, params, seed, trials, output_dir"));
    }
  }
  if (c.subcommand.empty()) return Invalid(source, "missing 'subcommand'");
  absl::StatusOr<ExperimentConfig> resolved = ResolveConfig(std::move(c));
  if (!resolved.ok()) {
    // Point at the offending parameter when it appears in the text.
    const std::string msg(resolved.status().message());
    const std::string key = msg.substr(0, msg.find(':'));
    const int line = LineOfKey(text, key);
    return Invalid(line > 0 ? where(key) : std::string(source), msg);
  }
  return resolved;
}

absl::StatusOr<ExperimentConfig> ResolveConfig(ExperimentConfig config) {
  if (!kSubcommands.count(config.subcommand)) {
    return Invalid("subcommand", absl::StrCat("unknown subcommand '", config.subcommand,
                                              "'; expected one of ",
                                              absl::StrJoin(kSubcommands, ", ")));
  }
  if (config.trials < 1) return Invalid("trials", "must be >= 1");
  if (!config.params.is_object()) return Invalid("params", "must be an object");
  const auto& allowed = ParamSchemas().at(config.subcommand);
  for (const auto& [key, v] : config.params.items()) {
    if (!allowed.count(key)) {
      return Invalid(key, absl::StrCat("unknown parameter for '", config.subcommand,
                                       "'; allowed: ", absl::StrJoin(allowed, ", ")));
    }
  }
  return config;
}

absl::Status RunExperiment(const ExperimentConfig& input) {
  ExperimentConfig c = input;
  Outputs out;
  absl::Status s;
  if (c.subcommand == "reduce") {
    s = RunReduce(c, out);
  } else if (c.subcommand == "mpj") {
    s = RunMpj(c, out);
  } else if (c.subcommand == "hypotest") {
    s = RunHypotest(c, out);
  } else if (c.subcommand == "audit") {
    s = RunAudit(c, out);
  } else if (c.subcommand == "enumerate") {
    s = RunEnumerate(c, out);
  } else {
    s = Invalid("subcommand", c.subcommand);
  }
  CLI_RETURN_IF_ERROR(s);

  std::error_code ec;
  const std::filesystem::path dir(c.output_dir);
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", c.output_dir, ": ", ec.message()));
  }
  std::string jsonl;
  for (const auto& r : out.records) absl::StrAppend(&jsonl, DumpJson(r), "\n");
  CLI_RETURN_IF_ERROR(WriteText(dir / "results.jsonl", jsonl));
  std::vector<std::string> header, row;
  for (const auto& h : out.summary_header) header.push_back(CsvField(h));
  for (const auto& v : out.summary_row) row.push_back(CsvField(v));
  CLI_RETURN_IF_ERROR(WriteText(dir / "summary.csv",
                                absl::StrCat(absl::StrJoin(header, ","), "\n",
                                             absl::StrJoin(row, ","), "\n")));
  CLI_RETURN_IF_ERROR(WriteText(dir / "config.json", DumpJson(ConfigToJson(c), 2) + "\n"));
  for (const auto& [name, doc] : out.reports) {
    CLI_RETURN_IF_ERROR(WriteText(dir / name, DumpJson(doc, 2) + "\n"));
  }
  return absl::OkStatus();
}

namespace {

// Splits "0.4,0.6" into numbers.
absl::StatusOr<OrderedJson> NumberList(const std::string& text, absl::string_view flag) {
  OrderedJson arr = OrderedJson::array();
  for (absl::string_view part : absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    double v = 0.0;
    if (!absl::SimpleAtod(part, &v)) {
      return Invalid(flag, absl::StrCat("'", part, "' is not a number"));
    }
    arr.push_back(v);
  }
  return arr;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Simulation and verification lab for interactive local "
               "differential privacy protocols"};
  app.name("ldpi");
  std::string config_path;
  app.add_option("--config", config_path, "Run an experiment from a JSON config");
  app.require_subcommand(0, 1);

  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  std::string output_dir = ".";
  OrderedJson params = OrderedJson::object();
  std::map<std::string, std::string> raw;  // flag name -> text

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--trials", trials, "Number of trials");
    sub->add_option("--output-dir", output_dir, "Directory for outputs");
  };
  auto str_opt = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option("--" + name, raw[name], help);
  };

  CLI::App* reduce = app.add_subcommand("reduce", "Run the sequential reduction");
  common(reduce);
  str_opt(reduce, "protocol", "Protocol JSON file");
  str_opt(reduce, "n", "Number of users");
  str_opt(reduce, "eps", "Target eps");
  str_opt(reduce, "anchor", "Decomposition anchor symbol");

  CLI::App* mpj = app.add_subcommand("mpj", "Solve pointer-jumping instances");
  common(mpj);
  str_opt(mpj, "d", "Tree depth");
  str_opt(mpj, "s", "Arity (default d^4)");
  str_opt(mpj, "eps", "Privacy parameter");
  str_opt(mpj, "m", "Users per group (default from the analysis)");
  str_opt(mpj, "baseline", "none or sequential-cohorts");

  CLI::App* hyp = app.add_subcommand("hypotest", "Private hypothesis testing");
  common(hyp);
  str_opt(hyp, "mode", "simple or compound");
  str_opt(hyp, "p0", "Comma-separated probabilities of P0");
  str_opt(hyp, "p1", "Comma-separated probabilities of P1");
  str_opt(hyp, "instance", "Compound instance JSON file");
  str_opt(hyp, "eps", "Privacy parameter");
  str_opt(hyp, "alpha", "Separation used to scale n");
  str_opt(hyp, "n", "Number of users");
  str_opt(hyp, "tol", "Game solver tolerance");
  bool auto_n = false;
  hyp->add_flag("--auto-n", auto_n, "Calibrate n = c / (eps alpha)^2");

  CLI::App* audit = app.add_subcommand("audit", "Exhaustive privacy audit");
  common(audit);
  str_opt(audit, "protocol", "Protocol JSON file");
  str_opt(audit, "n", "Number of users");
  str_opt(audit, "max_leaves", "Transcript cap");

  CLI::App* en = app.add_subcommand("enumerate", "Exact transcript distribution");
  common(en);
  str_opt(en, "protocol", "Protocol JSON file");
  str_opt(en, "semantics", "follow, bayes or reduction");
  str_opt(en, "n", "Number of users");
  str_opt(en, "max_leaves", "Transcript cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  absl::StatusOr<ExperimentConfig> config;
  const auto subs = app.get_subcommands();
  if (!config_path.empty()) {
    if (!subs.empty()) {
      std::cerr << "ldpi: --config cannot be combined with a subcommand\n";
      return kExitValidation;
    }
    absl::StatusOr<std::string> text = ReadFile(config_path);
    if (!text.ok()) {
      std::cerr << "ldpi: " << text.status().message() << "\n";
      return kExitValidation;
    }
    config = ParseConfig(*text, config_path);
  } else if (subs.empty()) {
    std::cerr << app.help();
    return kExitValidation;
  } else {
    CLI::App* sub = subs.front();
    const std::set<std::string> strings = {"protocol", "baseline", "mode", "instance",
                                           "semantics"};
    const std::set<std::string> lists = {"p0", "p1"};
    absl::Status bad;
    for (const auto& [name, text] : raw) {
      CLI::Option* opt = sub->get_option_no_throw("--" + name);
      if (opt == nullptr || opt->count() == 0) continue;
      if (strings.count(name)) {
        params[name] = text;
      } else if (lists.count(name)) {
        absl::StatusOr<OrderedJson> arr = NumberList(text, name);
        if (!arr.ok()) {
          bad = arr.status();
          break;
        }
        params[name] = *arr;
      } else {
        std::int64_t i = 0;
        double d = 0.0;
        if (absl::SimpleAtoi(text, &i)) {
          params[name] = i;
        } else if (absl::SimpleAtod(text, &d)) {
          params[name] = d;
        } else {
          bad = Invalid(name, absl::StrCat("'", text, "' is not a number"));
          break;
        }
      }
    }
    if (sub->get_name() == "hypotest" && auto_n) params["auto_n"] = true;
    if (!bad.ok()) {
      config = bad;
    } else {
      ExperimentConfig c;
      c.subcommand = sub->get_name();
      c.params = params;
      c.seed = seed;
      c.trials = trials;
      c.output_dir = output_dir;
      config = ResolveConfig(std::move(c));
    }
  }
  if (!config.ok()) {
    std::cerr << "ldpi: " << config.status().message() << "\n";
    return kExitValidation;
  }
  const absl::Status status = RunExperiment(*config);
  if (!status.ok()) {
    std::cerr << "ldpi: " << status.message() << "\n";
    return ExitCodeFor(status);
  }
  return kExitOk;
}

}  // namespace ldp_interact::cli
