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

#ifndef FAIRMAS_SCENARIO_H_
#define FAIRMAS_SCENARIO_H_

// Scenario documents (.fairmas.json) and the traffic scenario family.
// The document schema is described in docs/scenario_format.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairmas/core_model.h"

namespace fairmas {

inline constexpr std::string_view kSchemaVersion = "1";

struct LoadOptions {
  bool lenient = false;  // accept unknown keys
};

// Throws kParseError (with byte offset or JSON pointer),
// kUnsupportedSchemaVersion, or ValidationError.
SystemSpec LoadSystem(std::string_view document, const LoadOptions& options = {});
SystemSpec LoadSystemFile(const std::filesystem::path& path,
                          const LoadOptions& options = {});

// Canonical document; LoadSystem(SaveSystem(s)) == s for valid s.
std::string SaveSystem(const SystemSpec& spec);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);

// Attribute index by name; throws kUnknownAttribute.
int FindAttribute(const SystemSpec& spec, std::string_view name);

struct SystemSummary {
  int states = 0;
  int actions = 0;
  int agents = 0;
  int attributes = 0;
  std::vector<std::string> protected_names;
  bool attribute_sensitive = false;
  int horizon = 0;
  std::uint64_t branching = 0;  // max children of any state
  std::optional<std::uint64_t> estimated_runs;  // nullopt on overflow
};

SystemSummary Describe(const SystemSpec& spec, int horizon);

// Traffic corridor: each car advances from position 0 towards position
// `corridor_length` on a fast or a slow route. AI-driven cars pick the fast
// route more often and succeed on it more often; a dedicated lane closes the
// fast route to AI-driven cars.
namespace traffic {

inline constexpr int kHumanDriven = 0;  // protected
inline constexpr int kHighSpeed = 1;
inline constexpr ActionId kAdvanceFast = 1;
inline constexpr ActionId kAdvanceSlow = 2;

struct Car {
  bool human_driven = false;
  bool high_speed = true;

  bool operator==(const Car&) const = default;
};

struct Params {
  int corridor_length = 3;
  std::vector<Car> cars = {{true, true}, {false, true}};
  double fast_route_gain = 0.9;  // AI-driven car on the fast route
  double human_gain = 0.6;       // human-driven car on the fast route
  double slow_route_gain = 0.5;
  bool dedicated_lane = false;
  double arrival_reward = 10.0;
  double step_cost = -1.0;
  // Probability of choosing the fast route before arrival.
  double ai_fast_prob = 0.8;
  double human_fast_prob = 0.5;

  bool operator==(const Params&) const = default;
};

// Throws kInvalidArgument on out-of-range parameters.
void CheckParams(const Params& params);

SystemSpec Build(const Params& params);

// "human:high,ai:low" <-> cars.
std::vector<Car> ParseCars(std::string_view text);
std::string FormatCars(const std::vector<Car>& cars);

}  // namespace traffic

}  // namespace fairmas

#endif  // FAIRMAS_SCENARIO_H_
