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

#include "ldp_interact/json_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "ldp_interact/mpj.h"
#include "ldp_interact/protocol.h"
#include "ldp_interact/randomizer.h"
#include "status_macros.h"

namespace ldp_interact {
namespace {

using Json = nlohmann::json;

// Carries the source text so that errors can point at a line.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  absl::Status Error(absl::string_view key, absl::string_view message) const {
    const int line = LineOfKey(text_, std::string_view(key.data(), key.size()));
    if (line > 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line, ": '", key, "': ", message));
    }
    return absl::InvalidArgumentError(absl::StrCat("'", key, "': ", message));
  }

  absl::Status CheckKeys(const Json& obj, absl::string_view where,
                         const std::set<std::string>& allowed) const {
    if (!obj.is_object()) return Error(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) {
        return Error(key, absl::StrCat("unknown key in ", where, "; allowed: ",
                                       absl::StrJoin(allowed, ", ")));
      }
    }
    return absl::OkStatus();
  }

  absl::StatusOr<const Json*> Field(const Json& obj, const std::string& key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) return Error(key, "missing required key");
    return &*it;
  }

  absl::StatusOr<double> Number(const Json& v, absl::string_view key) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      double d = 0.0;
      if (absl::SimpleAtod(v.get<std::string>(), &d)) return d;
    }
    return Error(key, "expected a number or a decimal string");
  }

  absl::StatusOr<std::int64_t> Integer(const Json& v, absl::string_view key) const {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    return Error(key, "expected an integer");
  }

  absl::StatusOr<double> NumberField(const Json& obj, const std::string& key) const {
    LDPI_ASSIGN_OR_RETURN(const Json* v, Field(obj, key));
    return Number(*v, key);
  }

  absl::StatusOr<std::int64_t> IntField(const Json& obj, const std::string& key) const {
    LDPI_ASSIGN_OR_RETURN(const Json* v, Field(obj, key));
    return Integer(*v, key);
  }

  absl::StatusOr<std::vector<double>> Numbers(const Json& v, absl::string_view key) const {
    if (!v.is_array()) return Error(key, "expected an array");
    std::vector<double> out;
    for (const Json& e : v) {
      LDPI_ASSIGN_OR_RETURN(double d, Number(e, key));
      out.push_back(d);
    }
    return out;
  }

  absl::StatusOr<std::vector<Symbol>> Symbols(const Json& v, absl::string_view key) const {
    if (!v.is_array()) return Error(key, "expected an array of integers");
    std::vector<Symbol> out;
    for (const Json& e : v) {
      LDPI_ASSIGN_OR_RETURN(std::int64_t s, Integer(e, key));
      out.push_back(static_cast<Symbol>(s));
    }
    return out;
  }

  // Either [p_0, p_1, ...] or {"support": [...], "probs": [...]}.
  absl::StatusOr<FiniteDist> Dist(const Json& v, absl::string_view key) const {
    if (v.is_array()) {
      LDPI_ASSIGN_OR_RETURN(auto probs, Numbers(v, key));
      absl::StatusOr<FiniteDist> d = FiniteDist::FromProbs(std::move(probs));
      if (!d.ok()) return Error(key, d.status().message());
      return d;
    }
    LDPI_RETURN_IF_ERROR(CheckKeys(v, key, {"support", "probs"}));
    LDPI_ASSIGN_OR_RETURN(const Json* s, Field(v, "support"));
    LDPI_ASSIGN_OR_RETURN(const Json* p, Field(v, "probs"));
    LDPI_ASSIGN_OR_RETURN(auto support, Symbols(*s, "support"));
    LDPI_ASSIGN_OR_RETURN(auto probs, Numbers(*p, "probs"));
    absl::StatusOr<FiniteDist> d =
        FiniteDist::Create(std::move(support), std::move(probs));
    if (!d.ok()) return Error(key, d.status().message());
    return d;
  }

 private:
  std::string_view text_;
};

struct RoundSpec {
  int user = 0;
  int randomizer = 0;
  std::optional<double> eps;
};

// One scripted round: fixed, or keyed by the previous round's message.
struct ScriptedRound {
  std::optional<RoundSpec> fixed;
  std::map<Symbol, std::optional<RoundSpec>> branches;
  bool branching = false;
};

absl::StatusOr<std::optional<RoundSpec>> ParseRoundSpec(const Reader& rd,
                                                        const Json& v) {
  if (v.is_null()) return std::optional<RoundSpec>();
  LDPI_RETURN_IF_ERROR(rd.CheckKeys(v, "rounds", {"user", "randomizer", "eps"}));
  RoundSpec spec;
  LDPI_ASSIGN_OR_RETURN(std::int64_t user, rd.IntField(v, "user"));
  LDPI_ASSIGN_OR_RETURN(std::int64_t rid, rd.IntField(v, "randomizer"));
  spec.user = static_cast<int>(user);
  spec.randomizer = static_cast<int>(rid);
  if (v.contains("eps")) {
    LDPI_ASSIGN_OR_RETURN(double e, rd.Number(v["eps"], "eps"));
    spec.eps = e;
  }
  return std::optional<RoundSpec>(spec);
}

absl::StatusOr<ProtocolInstance> BuildScripted(const Reader& rd, const Json& doc) {
  LDPI_ASSIGN_OR_RETURN(std::int64_t n, rd.IntField(doc, "n"));
  LDPI_ASSIGN_OR_RETURN(double eps, rd.NumberField(doc, "eps"));
  LDPI_ASSIGN_OR_RETURN(const Json* reg_json, rd.Field(doc, "registry"));
  if (!reg_json->is_array()) return rd.Error("registry", "expected an array");
  Registry registry;
  for (const Json& t : *reg_json) {
    LDPI_RETURN_IF_ERROR(rd.CheckKeys(
        t, "registry", {"name", "domain", "range", "rows", "eps", "delta"}));
    LDPI_ASSIGN_OR_RETURN(const Json* dom, rd.Field(t, "domain"));
    LDPI_ASSIGN_OR_RETURN(const Json* ran, rd.Field(t, "range"));
    LDPI_ASSIGN_OR_RETURN(const Json* rows_json, rd.Field(t, "rows"));
    LDPI_ASSIGN_OR_RETURN(auto domain, rd.Symbols(*dom, "domain"));
    LDPI_ASSIGN_OR_RETURN(auto range, rd.Symbols(*ran, "range"));
    if (!rows_json->is_array()) return rd.Error("rows", "expected an array");
    std::vector<std::vector<double>> rows;
    for (const Json& row : *rows_json) {
      LDPI_ASSIGN_OR_RETURN(auto r, rd.Numbers(row, "rows"));
      rows.push_back(std::move(r));
    }
    LDPI_ASSIGN_OR_RETURN(double table_eps, rd.NumberField(t, "eps"));
    double delta = 0.0;
    if (t.contains("delta")) {
      LDPI_ASSIGN_OR_RETURN(delta, rd.Number(t["delta"], "delta"));
    }
    const std::string name = t.value("name", absl::StrCat("r", registry.size()));
    absl::StatusOr<Randomizer> r =
        Randomizer::Create(std::move(domain), std::move(range), std::move(rows),
                           table_eps, delta, name);
    if (!r.ok()) return rd.Error("registry", r.status().message());
    registry.push_back(*std::move(r));
  }

  LDPI_ASSIGN_OR_RETURN(const Json* rounds_json, rd.Field(doc, "rounds"));
  if (!rounds_json->is_array()) return rd.Error("rounds", "expected an array");
  std::vector<ScriptedRound> rounds;
  for (const Json& r : *rounds_json) {
    ScriptedRound sr;
    if (r.is_object() && r.contains("branch_on_previous")) {
      LDPI_RETURN_IF_ERROR(rd.CheckKeys(r, "rounds", {"branch_on_previous"}));
      const Json& b = r["branch_on_previous"];
      if (!b.is_object()) {
        return rd.Error("branch_on_previous", "expected an object");
      }
      sr.branching = true;
      for (const auto& [key, spec] : b.items()) {
        int message = 0;
        if (!absl::SimpleAtoi(key, &message)) {
          return rd.Error("branch_on_previous", "keys must be message symbols");
        }
        LDPI_ASSIGN_OR_RETURN(sr.branches[message], ParseRoundSpec(rd, spec));
      }
    } else {
      LDPI_ASSIGN_OR_RETURN(sr.fixed, ParseRoundSpec(rd, r));
    }
    rounds.push_back(std::move(sr));
  }

  std::vector<double> cost;
  for (const Randomizer& r : registry) cost.push_back(MinimalEps(r));
  StepFn step = [rounds, cost](std::span<const RoundRecord> t)
      -> std::optional<Assignment> {
    if (t.size() >= rounds.size()) return std::nullopt;
    const ScriptedRound& sr = rounds[t.size()];
    std::optional<RoundSpec> spec = sr.fixed;
    if (sr.branching) {
      if (t.empty()) return std::nullopt;
      const auto it = sr.branches.find(t.back().message);
      if (it == sr.branches.end()) return std::nullopt;
      spec = it->second;
    }
    if (!spec.has_value()) return std::nullopt;
    // Unknown ids are caught by Protocol::Next.
    const double charge =
        spec->eps.value_or(spec->randomizer >= 0 &&
                                   static_cast<std::size_t>(spec->randomizer) <
                                       cost.size()
                               ? cost[static_cast<std::size_t>(spec->randomizer)]
                               : 0.0);
    return Assignment{spec->user, spec->randomizer, charge, 0.0};
  };

  FiniteDist prior = FiniteDist::Uniform(1);
  if (doc.contains("prior")) {
    LDPI_ASSIGN_OR_RETURN(prior, rd.Dist(doc["prior"], "prior"));
  } else if (!registry.empty()) {
    const auto dom = registry.front().domain();
    absl::StatusOr<FiniteDist> u = FiniteDist::Create(
        {dom.begin(), dom.end()},
        std::vector<double>(dom.size(), 1.0 / static_cast<double>(dom.size())));
    if (!u.ok()) return u.status();
    prior = *std::move(u);
  }
  auto shared = std::make_shared<const Registry>(std::move(registry));
  const std::string name = doc.value("name", std::string("scripted"));
  absl::StatusOr<Protocol> p = Protocol::Create(
      name, static_cast<int>(n), std::move(shared), std::move(step), eps);
  if (!p.ok()) return p.status();
  return ProtocolInstance{*std::move(p), std::move(prior), static_cast<int>(n)};
}

}  // namespace

std::string LineColumn(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return absl::StrCat("line ", line, ", column ", offset - line_start + 1);
}

int LineOfKey(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const std::size_t pos = text.find(quoted);
  if (pos == std::string_view::npos) return 0;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::StatusOr<LoadedProtocol> ParseProtocolJson(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(absl::StrCat(
        LineColumn(text, e.byte > 0 ? e.byte - 1 : 0), ": ", e.what()));
  }
  const Reader rd(text);
  LDPI_RETURN_IF_ERROR(rd.CheckKeys(
      doc, "protocol",
      {"builder", "params", "prior", "registry", "rounds", "n", "eps", "wrap",
       "anchor", "name"}));
  LDPI_ASSIGN_OR_RETURN(const Json* builder_json, rd.Field(doc, "builder"));
  if (!builder_json->is_string()) return rd.Error("builder", "expected a string");
  const std::string builder = builder_json->get<std::string>();
  const Json params = doc.value("params", Json::object());

  std::optional<ProtocolInstance> instance;
  double eps = 0.0;
  bool wrap = false;
  std::optional<Symbol> anchor;
  if (builder == "histogram") {
    LDPI_RETURN_IF_ERROR(rd.CheckKeys(params, "params", {"d", "eps", "n"}));
    LDPI_ASSIGN_OR_RETURN(std::int64_t d, rd.IntField(params, "d"));
    LDPI_ASSIGN_OR_RETURN(eps, rd.NumberField(params, "eps"));
    LDPI_ASSIGN_OR_RETURN(std::int64_t n, rd.IntField(params, "n"));
    LDPI_ASSIGN_OR_RETURN(instance, HistogramProtocol(static_cast<int>(d),
                                                          eps, static_cast<int>(n)));
  } else if (builder == "simple_hypotest") {
    LDPI_RETURN_IF_ERROR(rd.CheckKeys(params, "params", {"p0", "p1", "eps", "n"}));
    LDPI_ASSIGN_OR_RETURN(const Json* p0j, rd.Field(params, "p0"));
    LDPI_ASSIGN_OR_RETURN(const Json* p1j, rd.Field(params, "p1"));
    LDPI_ASSIGN_OR_RETURN(FiniteDist p0, rd.Dist(*p0j, "p0"));
    LDPI_ASSIGN_OR_RETURN(FiniteDist p1, rd.Dist(*p1j, "p1"));
    LDPI_ASSIGN_OR_RETURN(eps, rd.NumberField(params, "eps"));
    LDPI_ASSIGN_OR_RETURN(std::int64_t n, rd.IntField(params, "n"));
    LDPI_ASSIGN_OR_RETURN(instance,
                          SimpleHypotestProtocol(p0, p1, eps, static_cast<int>(n)));
  } else if (builder == "corpus") {
    LDPI_RETURN_IF_ERROR(rd.CheckKeys(params, "params", {"name", "eps"}));
    LDPI_ASSIGN_OR_RETURN(const Json* name, rd.Field(params, "name"));
    if (!name->is_string()) return rd.Error("name", "expected a string");
    LDPI_ASSIGN_OR_RETURN(eps, rd.NumberField(params, "eps"));
    LDPI_ASSIGN_OR_RETURN(instance,
                          CorpusProtocol(name->get<std::string>(), eps));
  } else if (builder == "mpj_full") {
    LDPI_RETURN_IF_ERROR(
        rd.CheckKeys(params, "params", {"d", "s", "m", "eps", "instance_seed"}));
    LDPI_ASSIGN_OR_RETURN(std::int64_t d, rd.IntField(params, "d"));
    LDPI_ASSIGN_OR_RETURN(std::int64_t s, rd.IntField(params, "s"));
    LDPI_ASSIGN_OR_RETURN(std::int64_t m, rd.IntField(params, "m"));
    LDPI_ASSIGN_OR_RETURN(eps, rd.NumberField(params, "eps"));
    std::int64_t seed = 0;
    if (params.contains("instance_seed")) {
      LDPI_ASSIGN_OR_RETURN(seed, rd.Integer(params["instance_seed"], "instance_seed"));
    }
    LDPI_ASSIGN_OR_RETURN(Protocol p,
                          MpjFullProtocol(static_cast<int>(d), s, m, eps));
    SeededRng rng(static_cast<std::uint64_t>(seed));
    LDPI_ASSIGN_OR_RETURN(MpjInstance inst,
                          RandomMpjInstance(static_cast<int>(d), s, rng));
    LDPI_ASSIGN_OR_RETURN(FiniteDist prior, MpjPrior(inst));
    const int n = p.n_declared();
    instance.emplace(ProtocolInstance{std::move(p), std::move(prior), n});
  } else if (builder == "scripted") {
    LDPI_ASSIGN_OR_RETURN(instance, BuildScripted(rd, doc));
    LDPI_ASSIGN_OR_RETURN(eps, rd.NumberField(doc, "eps"));
  } else {
    return rd.Error("builder", absl::StrCat("unknown builder '", builder, "'"));
  }

  if (builder != "scripted" && doc.contains("prior")) {
    LDPI_ASSIGN_OR_RETURN(instance->prior, rd.Dist(doc["prior"], "prior"));
  }
  if (doc.contains("wrap")) {
    if (doc["wrap"] != "reduction") {
      return rd.Error("wrap", "only \"reduction\" is supported");
    }
    wrap = true;
  }
  if (doc.contains("anchor")) {
    LDPI_ASSIGN_OR_RETURN(std::int64_t a, rd.Integer(doc["anchor"], "anchor"));
    anchor = static_cast<Symbol>(a);
  }
  std::vector<Symbol> domain;
  const Registry& reg = instance->protocol.registry();
  if (!reg.empty()) {
    domain.assign(reg.front().domain().begin(), reg.front().domain().end());
  } else {
    domain.assign(instance->prior.support().begin(),
                  instance->prior.support().end());
  }
  return LoadedProtocol{*std::move(instance), std::move(domain), eps, wrap,
                        anchor};
}

absl::StatusOr<LoadedProtocol> LoadProtocolFile(const std::string& path) {
  LDPI_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseProtocolJson(text);
}

}  // namespace ldp_interact
