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

#ifndef FAIRMAS_CORE_MODEL_H_
#define FAIRMAS_CORE_MODEL_H_

// Data model for a multi-agent system: environment states, a global action
// set with a reserved null action, a population of agents carrying binary
// attributes, and a stochastic state transformer.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairmas/error.h"

namespace fairmas {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

// Index 0 of the global action set is the null action in every system.
inline constexpr ActionId kNullAction = 0;

// Probability rows must sum to one within this tolerance.
inline constexpr double kNormalizationTolerance = 1e-9;

// One bit per attribute, in declaration order.
using AttributeAssignment = std::vector<std::uint8_t>;

// n x |At| matrix; row x is agent x's assignment.
using AttributeProfile = std::vector<AttributeAssignment>;

struct AgentSpec {
  AttributeAssignment attributes;
  // Available actions (ascending, must contain kNullAction).
  std::vector<ActionId> actions;
  // policy[state][action] over the global action set; zero outside `actions`.
  std::vector<std::vector<double>> policy;
  // Sparse state-pair rewards; unlisted pairs are worth 0.
  std::map<std::pair<StateId, StateId>, double> rewards;

  bool operator==(const AgentSpec&) const = default;
};

// Requires agent `agent` to have bit `value` for attribute `attribute`.
struct ProfileLiteral {
  int agent = 0;
  int attribute = 0;
  std::uint8_t value = 0;

  auto operator<=>(const ProfileLiteral&) const = default;
};

struct Outcome {
  StateId next = 0;
  double prob = 0.0;

  bool operator==(const Outcome&) const = default;
};

struct TransitionEntry {
  StateId state = 0;
  std::vector<ActionId> joint;  // one action per agent
  // Conjunction of literals over the population profile; empty = always.
  std::vector<ProfileLiteral> condition;
  std::vector<Outcome> next;

  bool operator==(const TransitionEntry&) const = default;
};

struct TransitionSpec {
  std::vector<TransitionEntry> entries;
  bool attribute_sensitive = false;

  bool operator==(const TransitionSpec&) const = default;
};

struct SystemSpec {
  int num_states = 0;
  std::vector<std::string> state_names;  // empty or one per state
  StateId start = 0;
  std::vector<std::string> action_names;
  std::vector<AgentSpec> agents;
  std::vector<std::string> attribute_names;
  std::vector<int> protected_attributes;  // ascending
  TransitionSpec transition;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_actions() const { return static_cast<int>(action_names.size()); }
  int num_attributes() const { return static_cast<int>(attribute_names.size()); }
  bool is_protected(int attribute) const;

  bool operator==(const SystemSpec&) const = default;
};

struct Run {
  std::vector<StateId> states;                  // e_0 .. e_H
  std::vector<std::vector<ActionId>> joint_actions;  // H tuples of n actions
  double probability = 0.0;

  int horizon() const { return static_cast<int>(joint_actions.size()); }
  bool operator==(const Run&) const = default;
};

struct Violation {
  std::string code;
  std::string message;
  std::optional<int> agent;
  std::optional<int> state;
  std::optional<int> entry;

  bool operator==(const Violation&) const = default;
};

// Returns every broken invariant; an empty list means the system is valid.
// Pure: repeated calls return identical lists.
std::vector<Violation> ValidateSystem(const SystemSpec& spec);

// Thrown when a system must be valid to proceed.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Throws ValidationError unless ValidateSystem(spec) is empty.
void RequireValid(const SystemSpec& spec);

AttributeProfile GetAttributeProfile(const SystemSpec& spec);

// True iff x holds `attribute`, y does not, and both agree on every other
// attribute. Only attributes are inspected.
bool MatchesExcept(const SystemSpec& spec, int x, int y, int attribute);

bool ConditionHolds(std::span<const ProfileLiteral> condition,
                    const AttributeProfile& profile);

// Lookup of transition entries by (state, joint action).
class TransitionIndex {
 public:
  explicit TransitionIndex(const SystemSpec& spec);

  // Indices of entries keyed by (state, joint) whose condition holds for
  // `profile`, ascending.
  std::vector<int> Matching(StateId state, std::span<const ActionId> joint,
                            const AttributeProfile& profile) const;

 private:
  std::vector<std::vector<ProfileLiteral>> conditions_;
  std::map<std::pair<StateId, std::vector<ActionId>>, std::vector<int>> by_key_;
};

}  // namespace fairmas

#endif  // FAIRMAS_CORE_MODEL_H_
