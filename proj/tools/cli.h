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

#ifndef LDP_INTERACT_TOOLS_CLI_H_
#define LDP_INTERACT_TOOLS_CLI_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace ldp_interact::cli {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct ExperimentConfig {
  std::string subcommand;
  OrderedJson params = OrderedJson::object();
  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  std::string output_dir = ".";
};

// Parses a config document with keys {subcommand, params, seed, trials,
// output_dir}. Errors name the source and line.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text,
                                             std::string_view source);

// Fills defaults and checks params against the subcommand's schema.
absl::StatusOr<ExperimentConfig> ResolveConfig(ExperimentConfig config);

// Runs a resolved config, writing results.jsonl, summary.csv, config.json
// and any subcommand report into output_dir. InvalidArgument and NotFound
// mark bad input; anything else is a runtime failure.
absl::Status RunExperiment(const ExperimentConfig& config);

// JSON text with every floating-point value printed as %.17g. indent < 0
// gives a single line.
std::string DumpJson(const OrderedJson& value, int indent = -1);

// FNV-1a 64-bit hash in 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view data);

// Exit code for a status returned by the functions above.
int ExitCodeFor(const absl::Status& status);

// Entry point of the ldpi binary.
int Main(int argc, char** argv);

}  // namespace ldp_interact::cli

#endif  // LDP_INTERACT_TOOLS_CLI_H_
