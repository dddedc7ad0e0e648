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
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace ldp_interact {
namespace {

using ::testing::HasSubstr;

TEST(ParseProtocolJsonTest, CorpusBuilder) {
  ASSERT_OK_AND_ASSIGN(LoadedProtocol lp, ParseProtocolJson(R"({
    "builder": "corpus", "params": {"name": "repeat_rr", "eps": 0.5}, "wrap": "reduction"
  })"));
  EXPECT_EQ(lp.instance.protocol.name(), "repeat_rr");
  EXPECT_DOUBLE_EQ(lp.eps, 0.5);
  EXPECT_TRUE(lp.wrap_reduction);
  EXPECT_FALSE(lp.domain.empty());
}

TEST(ParseProtocolJsonTest, HistogramBuilder) {
  ASSERT_OK_AND_ASSIGN(LoadedProtocol lp, ParseProtocolJson(
      R"({"builder": "histogram", "params": {"d": 3, "eps": 1, "n": 4}})"));
  EXPECT_EQ(lp.instance.n, 4);
  EXPECT_EQ(lp.domain.size(), 3u);
  EXPECT_EQ(lp.instance.protocol.registry().size(), 3u);
}

TEST(ParseProtocolJsonTest, ScriptedProtocolWithBranch) {
  ASSERT_OK_AND_ASSIGN(LoadedProtocol lp, ParseProtocolJson(R"({
    "builder": "scripted",
    "n": 2,
    "eps": 1.0,
    "registry": [
      {"name": "rr", "domain": [0, 1], "range": [0, 1],
       "rows": [[0.7310585786300049, 0.2689414213699951],
                [0.2689414213699951, 0.7310585786300049]], "eps": 1.0},
      {"name": "coin", "domain": [0, 1], "range": [0, 1],
       "rows": [[0.5, 0.5], [0.5, 0.5]], "eps": 0}
    ],
    "rounds": [
      {"user": 0, "randomizer": 0},
      {"branch_on_previous": {"0": {"user": 1, "randomizer": 0}, "1": null}}
    ],
    "prior": [0.4, 0.6],
    "anchor": 1
  })"));
  EXPECT_EQ(lp.instance.n, 2);
  EXPECT_NEAR(lp.instance.prior.Prob(1), 0.6, 1e-15);
  ASSERT_TRUE(lp.anchor.has_value());
  EXPECT_EQ(*lp.anchor, 1);
  const std::vector<RoundRecord> after_zero = {{0, 0, 1.0, 0.0, 0}};
  ASSERT_OK_AND_ASSIGN(auto next, lp.instance.protocol.Next(after_zero));
  ASSERT_TRUE(next.has_value());
  EXPECT_EQ(next->user, 1);
  const std::vector<RoundRecord> after_one = {{0, 0, 1.0, 0.0, 1}};
  ASSERT_OK_AND_ASSIGN(auto halt, lp.instance.protocol.Next(after_one));
  EXPECT_FALSE(halt.has_value());
}

TEST(ParseProtocolJsonTest, UnknownKeyReportsLine) {
  const auto r = ParseProtocolJson("{\n  \"builder\": \"corpus\",\n  \"colour\": 1\n}");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("line 3"));
}

TEST(ParseProtocolJsonTest, SyntaxErrorReportsLine) {
  const auto r = ParseProtocolJson("{\n  \"builder\": \"corpus\",\n  \"params\": {,}\n}");
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("line 3"));
}

TEST(ParseProtocolJsonTest, RejectsBadValues) {
  EXPECT_FALSE(ParseProtocolJson(R"({"builder": "nope"})").ok());
  EXPECT_FALSE(ParseProtocolJson(
      R"({"builder": "corpus", "params": {"name": "repeat_rr", "eps": 1}, "wrap": "x"})").ok());
  EXPECT_FALSE(ParseProtocolJson(
      R"({"builder": "corpus", "params": {"name": "missing", "eps": 1}})").ok());
  EXPECT_FALSE(ParseProtocolJson(R"([1, 2])").ok());
}

TEST(LineColumnTest, CountsNewlines) {
  EXPECT_EQ(LineColumn("ab\ncd", 4), "line 2, column 2");
  EXPECT_EQ(LineOfKey("{\n\"a\": 1,\n\"b\": 2}", "b"), 3);
  EXPECT_EQ(LineOfKey("{}", "b"), 0);
}

TEST(FormatDoubleTest, SeventeenDigits) {
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(FormatDouble(NAN), "null");
}

TEST(ReadFileTest, MissingFileIsNotFound) {
  const auto r = ReadFile("/nonexistent/ldpi/file.json");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace ldp_interact
