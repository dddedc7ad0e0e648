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

#ifndef LDP_INTERACT_JSON_IO_H_
#define LDP_INTERACT_JSON_IO_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ldp_interact/builtin_protocols.h"
#include "ldp_interact/finite_dist.h"

namespace ldp_interact {

// A protocol description loaded from JSON.
struct LoadedProtocol {
  ProtocolInstance instance;
  // Data domain used for worst-case audits.
  std::vector<Symbol> domain;
  // Declared overall eps (the reduction target).
  double eps = 0.0;
  bool wrap_reduction = false;
  std::optional<Symbol> anchor;
};

// Parses a protocol document. Supported "builder" values:
//   histogram           params {d, eps, n}
//   simple_hypotest     params {p0, p1, eps, n}
//   corpus              params {name, eps}
//   mpj_full            params {d, s, m, eps, instance_seed}
//   scripted            "registry" tables, "rounds", "n", "eps", "prior"
// Optional top-level keys: "prior" (overrides the builder's), "wrap"
// ("reduction"), "anchor". Probabilities may be numbers or decimal strings.
// Unknown keys and syntax errors are InvalidArgument with a line reference.
absl::StatusOr<LoadedProtocol> ParseProtocolJson(std::string_view text);
absl::StatusOr<LoadedProtocol> LoadProtocolFile(const std::string& path);

// "line L, column C" for a byte offset into `text`.
std::string LineColumn(std::string_view text, std::size_t offset);

// Line of the first occurrence of "key" in `text`, or 0.
int LineOfKey(std::string_view text, std::string_view key);

// printf %.17g; non-finite values become "null".
std::string FormatDouble(double v);

absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace ldp_interact

#endif  // LDP_INTERACT_JSON_IO_H_
