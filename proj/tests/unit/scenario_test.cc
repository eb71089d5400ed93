// Copyright 2026 The fairmas Authors
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

#include "fairmas/scenario.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>

#include "fairmas/error.h"
#include "fixtures.h"

namespace fairmas {
namespace {

constexpr char kCoinDocument[] = R"({
  "schema_version": "1",
  "num_states": 2,
  "start": 0,
  "actions": ["null"],
  "attributes": ["pr", "other"],
  "protected": ["pr"],
  "agents": [
    {"attributes": [1, 0], "actions": ["null"],
     "policy": [{"null": 1}, {"null": 1.0}],
     "rewards": [[0, 1, 1.0]]}
  ],
  "transitions": {
    "attribute_sensitive": false,
    "entries": [
      {"state": 0, "joint": ["null"], "next": [[0, 0.3], [1, 0.7]]},
      {"state": 1, "joint": ["null"], "next": [[1, 1]]}
    ]
  }
})";

ErrorCode CodeOf(const std::string& text, LoadOptions options = {}) {
  try {
    LoadSystem(text, options);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInvalidArgument;
}

std::string Replace(std::string text, const std::string& from,
                    const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(LoadSystemTest, MinimalDocument) {
  const SystemSpec s = LoadSystem(kCoinDocument);
  EXPECT_EQ(s.num_states, 2);
  EXPECT_EQ(s, testing::CoinSystem());
}

TEST(LoadSystemTest, NonNormalizedRowFailsValidation) {
  const std::string text = Replace(kCoinDocument, "[1, 0.7]", "[1, 0.68]");
  try {
    LoadSystem(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailed);
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].code, "TRANSITION_NOT_NORMALIZED");
  }
}

TEST(LoadSystemTest, MalformedJsonReportsPosition) {
  try {
    LoadSystem("{\"schema_version\": \"1\",, }");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(LoadSystemTest, SchemaErrorsCarryPath) {
  const std::string text = Replace(kCoinDocument, "\"start\": 0", "\"start\": \"zero\"");
  try {
    LoadSystem(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("/start"), std::string::npos) << e.what();
  }
}

TEST(LoadSystemTest, UnknownKeysRejectedUnlessLenient) {
  const std::string text =
      Replace(kCoinDocument, "\"start\": 0", "\"start\": 0, \"comment\": \"x\"");
  EXPECT_EQ(CodeOf(text), ErrorCode::kParseError);
  EXPECT_EQ(LoadSystem(text, {true}), testing::CoinSystem());
}

TEST(LoadSystemTest, SchemaVersion) {
  EXPECT_EQ(CodeOf(Replace(kCoinDocument, "\"1\"", "\"2\"")),
            ErrorCode::kUnsupportedSchemaVersion);
}

TEST(LoadSystemTest, UnknownNamesAndDuplicates) {
  EXPECT_EQ(CodeOf(Replace(kCoinDocument, "\"protected\": [\"pr\"]",
                           "\"protected\": [\"age\"]")),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf(Replace(kCoinDocument, "[[0, 1, 1.0]]", "[[0, 1, 1.0], [0, 1, 2.0]]")),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf(Replace(kCoinDocument, "{\"null\": 1}", "{\"go\": 1}")),
            ErrorCode::kParseError);
}

TEST(SaveSystemTest, RoundTripsRandomSystems) {
  std::mt19937_64 rng(21);
  testing::RandomSystemOptions options;
  options.signed_rewards = true;
  for (int trial = 0; trial < 30; ++trial) {
    const SystemSpec s = testing::RandomSystem(rng, options);
    const std::string text = SaveSystem(s);
    EXPECT_EQ(LoadSystem(text), s);
    EXPECT_EQ(SaveSystem(LoadSystem(text)), text);
  }
}

TEST(SaveSystemTest, IdenticalSpecsGiveIdenticalBytes) {
  EXPECT_EQ(SaveSystem(testing::TwinSystem()), SaveSystem(testing::TwinSystem()));
}

TEST(SaveSystemTest, OmitsZeroRewardsAndPolicyEntries) {
  SystemSpec s = testing::TwinSystem();
  s.agents[0].rewards[{1, 1}] = 0.0;
  s.agents[1].policy[0] = {0.0, 1.0};
  const std::string text = SaveSystem(s);
  const auto doc = nlohmann::json::parse(text);
  for (const auto& r : doc["agents"][0]["rewards"]) EXPECT_NE(r[2].get<double>(), 0.0);
  EXPECT_EQ(doc["agents"][0]["rewards"].size(), 2u);
  EXPECT_FALSE(doc["agents"][1]["policy"][0].contains("null"));
  s.agents[0].rewards.erase({1, 1});
  EXPECT_EQ(LoadSystem(text), s);
}

TEST(FileIoTest, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "fairmas_scenario_test.json";
  WriteTextFile(path, SaveSystem(testing::CoinSystem()));
  EXPECT_EQ(LoadSystemFile(path), testing::CoinSystem());
  std::filesystem::remove(path);
  try {
    ReadTextFile(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(FindAttributeTest, ByName) {
  const SystemSpec s = testing::CoinSystem();
  EXPECT_EQ(FindAttribute(s, "other"), 1);
  try {
    FindAttribute(s, "age");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownAttribute);
  }
}

TEST(DescribeTest, Summaries) {
  const SystemSummary toy = Describe(testing::CoinSystem(), 3);
  EXPECT_EQ(toy.agents, 1);
  EXPECT_EQ(toy.states, 2);
  EXPECT_EQ(toy.branching, 2u);
  EXPECT_EQ(toy.estimated_runs, 8u);
  EXPECT_EQ(toy.protected_names, std::vector<std::string>{"pr"});

  const SystemSummary traffic = Describe(traffic::Build({}), 6);
  EXPECT_EQ(traffic.states, 16);
  EXPECT_EQ(traffic.branching, 16u);
  EXPECT_EQ(traffic.estimated_runs, 16777216u);
  EXPECT_FALSE(Describe(traffic::Build({}), 20).estimated_runs.has_value());
}

}  // namespace
}  // namespace fairmas
