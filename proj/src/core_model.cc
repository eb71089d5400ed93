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

#include "fairmas/core_model.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fairmas/error.h"

namespace fairmas {
namespace {

// Joint-action combinations checked per state before giving up.
constexpr std::size_t kMaxJointCombinations = 1u << 20;

class ViolationList {
 public:
  void Add(std::string code, std::string message,
           std::optional<int> agent = std::nullopt,
           std::optional<int> state = std::nullopt,
           std::optional<int> entry = std::nullopt) {
    list_.push_back({std::move(code), std::move(message), agent, state, entry});
  }
  bool empty() const { return list_.empty(); }
  std::vector<Violation> Take() { return std::move(list_); }

 private:
  std::vector<Violation> list_;
};

bool IsProbability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void CheckTopLevel(const SystemSpec& spec, ViolationList& out) {
  if (spec.num_states < 1) {
    out.Add("NO_STATES", "the state set is empty");
  }
  if (!spec.state_names.empty() &&
      static_cast<int>(spec.state_names.size()) != spec.num_states) {
    out.Add("STATE_NAMES_SHAPE",
            fmt::format("{} state names given for {} states",
                        spec.state_names.size(), spec.num_states));
  }
  if (spec.num_states >= 1 &&
      spec.start >= static_cast<StateId>(spec.num_states)) {
    out.Add("START_OUT_OF_RANGE",
            fmt::format("start state {} is not below {}", spec.start,
                        spec.num_states));
  }
  if (spec.action_names.empty()) {
    out.Add("NO_ACTIONS", "the action set is empty (index 0 must be null)");
  }
  if (spec.agents.empty()) {
    out.Add("NO_AGENTS", "the population is empty");
  }

  auto check_unique = [&](const std::vector<std::string>& names,
                          const char* code, const char* what) {
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      out.Add(code, fmt::format("duplicate {} name '{}'", what, *dup));
    }
  };
  check_unique(spec.action_names, "DUPLICATE_ACTION_NAME", "action");
  check_unique(spec.attribute_names, "DUPLICATE_ATTRIBUTE_NAME", "attribute");

  const auto& prot = spec.protected_attributes;
  if (prot.empty()) {
    out.Add("PROTECTED_EMPTY", "no protected attribute declared");
  }
  for (std::size_t i = 0; i < prot.size(); ++i) {
    if (prot[i] < 0 || prot[i] >= spec.num_attributes()) {
      out.Add("PROTECTED_OUT_OF_RANGE",
              fmt::format("protected attribute index {} out of range", prot[i]));
    } else if (i > 0 && prot[i] <= prot[i - 1]) {
      out.Add("PROTECTED_NOT_SORTED",
              "protected attribute indices must be strictly ascending");
    }
  }
  if (!prot.empty() &&
      static_cast<int>(prot.size()) >= spec.num_attributes()) {
    out.Add("PROTECTED_NOT_STRICT_SUBSET",
            "protected attributes must be a strict subset of all attributes");
  }
}

void CheckAgent(const SystemSpec& spec, int x, ViolationList& out) {
  const AgentSpec& agent = spec.agents[x];
  if (static_cast<int>(agent.attributes.size()) != spec.num_attributes()) {
    out.Add("ATTRIBUTE_SHAPE",
            fmt::format("agent has {} attribute bits, expected {}",
                        agent.attributes.size(), spec.num_attributes()),
            x);
  }
  for (std::uint8_t bit : agent.attributes) {
    if (bit > 1) {
      out.Add("ATTRIBUTE_NOT_BINARY", "attribute values must be 0 or 1", x);
      break;
    }
  }

  bool has_null = false;
  for (std::size_t i = 0; i < agent.actions.size(); ++i) {
    ActionId a = agent.actions[i];
    if (a >= static_cast<ActionId>(spec.num_actions())) {
      out.Add("ACTION_OUT_OF_RANGE",
              fmt::format("action index {} out of range", a), x);
    }
    if (i > 0 && a <= agent.actions[i - 1]) {
      out.Add("ACTIONS_NOT_SORTED",
              "agent action subset must be strictly ascending", x);
    }
    has_null |= (a == kNullAction);
  }
  if (!has_null) {
    out.Add("NULL_ACTION_MISSING", "agent action subset lacks the null action",
            x);
  }

  if (static_cast<int>(agent.policy.size()) != spec.num_states) {
    out.Add("POLICY_SHAPE",
            fmt::format("policy has {} rows for {} states", agent.policy.size(),
                        spec.num_states),
            x);
  }
  for (std::size_t s = 0; s < agent.policy.size(); ++s) {
    const auto& row = agent.policy[s];
    const int state = static_cast<int>(s);
    if (static_cast<int>(row.size()) != spec.num_actions()) {
      out.Add("POLICY_SHAPE",
              fmt::format("policy row has {} entries for {} actions",
                          row.size(), spec.num_actions()),
              x, state);
      continue;
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
      const double p = row[a];
      if (!IsProbability(p)) {
        out.Add("POLICY_PROB_OUT_OF_RANGE",
                fmt::format("probability {} for action {} is outside [0,1]", p,
                            a),
                x, state);
        continue;
      }
      if (p > 0.0 &&
          !std::binary_search(agent.actions.begin(), agent.actions.end(),
                              static_cast<ActionId>(a))) {
        out.Add("POLICY_OUTSIDE_ACTIONS",
                fmt::format("action {} has probability {} but is not available",
                            a, p),
                x, state);
      }
      sum += p;
    }
    if (!(std::abs(sum - 1.0) <= kNormalizationTolerance)) {
      out.Add("POLICY_NOT_NORMALIZED",
              fmt::format("policy probabilities sum to {:.17g}", sum), x,
              state);
    }
  }

  for (const auto& [key, value] : agent.rewards) {
    if (key.first >= static_cast<StateId>(spec.num_states) ||
        key.second >= static_cast<StateId>(spec.num_states)) {
      out.Add("REWARD_STATE_OUT_OF_RANGE",
              fmt::format("reward for ({}, {}) references an unknown state",
                          key.first, key.second),
              x);
    }
    if (!std::isfinite(value)) {
      out.Add("REWARD_NOT_FINITE",
              fmt::format("reward for ({}, {}) is not finite", key.first,
                          key.second),
              x);
    }
  }
}

void CheckEntry(const SystemSpec& spec, int e, ViolationList& out) {
  const TransitionEntry& entry = spec.transition.entries[e];
  if (entry.state >= static_cast<StateId>(spec.num_states)) {
    out.Add("TRANSITION_STATE_OUT_OF_RANGE",
            fmt::format("entry state {} out of range", entry.state),
            std::nullopt, std::nullopt, e);
  }
  if (static_cast<int>(entry.joint.size()) != spec.num_agents()) {
    out.Add("TRANSITION_SHAPE",
            fmt::format("joint action has {} components for {} agents",
                        entry.joint.size(), spec.num_agents()),
            std::nullopt, std::nullopt, e);
  }
  for (ActionId a : entry.joint) {
    if (a >= static_cast<ActionId>(spec.num_actions())) {
      out.Add("TRANSITION_ACTION_OUT_OF_RANGE",
              fmt::format("joint action component {} out of range", a),
              std::nullopt, std::nullopt, e);
    }
  }
  if (!entry.condition.empty() && !spec.transition.attribute_sensitive) {
    out.Add("CONDITION_WITHOUT_SENSITIVITY",
            "profile condition on a transformer declared attribute-insensitive",
            std::nullopt, std::nullopt, e);
  }
  for (const ProfileLiteral& lit : entry.condition) {
    if (lit.agent < 0 || lit.agent >= spec.num_agents() || lit.attribute < 0 ||
        lit.attribute >= spec.num_attributes() || lit.value > 1) {
      out.Add("CONDITION_OUT_OF_RANGE",
              fmt::format("condition literal (agent {}, attribute {}, value {}) "
                          "is invalid",
                          lit.agent, lit.attribute, lit.value),
              std::nullopt, std::nullopt, e);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < entry.next.size(); ++i) {
    const Outcome& o = entry.next[i];
    if (o.next >= static_cast<StateId>(spec.num_states)) {
      out.Add("TRANSITION_STATE_OUT_OF_RANGE",
              fmt::format("next state {} out of range", o.next), std::nullopt,
              std::nullopt, e);
    }
    if (i > 0 && o.next <= entry.next[i - 1].next) {
      out.Add("TRANSITION_OUTCOMES_NOT_SORTED",
              "next states must be strictly ascending", std::nullopt,
              std::nullopt, e);
    }
    if (!IsProbability(o.prob)) {
      out.Add("TRANSITION_PROB_OUT_OF_RANGE",
              fmt::format("probability {} is outside [0,1]", o.prob),
              std::nullopt, std::nullopt, e);
    }
    sum += o.prob;
  }
  if (!(std::abs(sum - 1.0) <= kNormalizationTolerance)) {
    out.Add("TRANSITION_NOT_NORMALIZED",
            fmt::format("next-state probabilities sum to {:.17g}", sum),
            std::nullopt, static_cast<int>(entry.state), e);
  }
}

// Every joint action that can occur (positive policy probability for each
// component) must resolve to exactly one entry under the actual profile.
void CheckCoverage(const SystemSpec& spec, ViolationList& out) {
  const TransitionIndex index(spec);
  const AttributeProfile profile = GetAttributeProfile(spec);
  const int n = spec.num_agents();

  for (int s = 0; s < spec.num_states; ++s) {
    std::vector<std::vector<ActionId>> support(n);
    std::size_t combos = 1;
    for (int x = 0; x < n; ++x) {
      const auto& row = spec.agents[x].policy[s];
      for (std::size_t a = 0; a < row.size(); ++a) {
        if (row[a] > 0.0) support[x].push_back(static_cast<ActionId>(a));
      }
      combos *= support[x].size();
      if (combos > kMaxJointCombinations) break;
    }
    if (combos > kMaxJointCombinations) {
      out.Add("JOINT_SPACE_TOO_LARGE",
              "too many joint actions to check transition coverage",
              std::nullopt, s);
      continue;
    }
    std::vector<std::size_t> digit(n, 0);
    std::vector<ActionId> joint(n);
    for (std::size_t c = 0; c < combos; ++c) {
      for (int x = 0; x < n; ++x) joint[x] = support[x][digit[x]];
      const auto hits = index.Matching(static_cast<StateId>(s), joint, profile);
      if (hits.size() != 1) {
        std::string actions;
        for (int x = 0; x < n; ++x) {
          actions += (x ? "," : "") + std::to_string(joint[x]);
        }
        if (hits.empty()) {
          out.Add("TRANSITION_MISSING",
                  fmt::format("no entry for joint action ({})", actions),
                  std::nullopt, s);
        } else {
          out.Add("TRANSITION_AMBIGUOUS",
                  fmt::format("{} entries match joint action ({})",
                              hits.size(), actions),
                  std::nullopt, s, hits[1]);
        }
      }
      for (int x = n - 1; x >= 0; --x) {
        if (++digit[x] < support[x].size()) break;
        digit[x] = 0;
      }
    }
  }
}

}  // namespace

bool SystemSpec::is_protected(int attribute) const {
  return std::binary_search(protected_attributes.begin(),
                            protected_attributes.end(), attribute);
}

std::vector<Violation> ValidateSystem(const SystemSpec& spec) {
  ViolationList out;
  CheckTopLevel(spec, out);
  for (int x = 0; x < spec.num_agents(); ++x) CheckAgent(spec, x, out);
  for (int e = 0; e < static_cast<int>(spec.transition.entries.size()); ++e) {
    CheckEntry(spec, e, out);
  }
  // Coverage needs well-shaped tables to be meaningful.
  if (out.empty()) CheckCoverage(spec, out);
  return out.Take();
}

namespace {

std::string DescribeViolations(const std::vector<Violation>& violations) {
  std::string msg = fmt::format("{} violation(s)", violations.size());
  if (!violations.empty()) {
    msg += fmt::format(", first: {}: {}", violations.front().code,
                       violations.front().message);
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::kValidationFailed, DescribeViolations(violations)),
      violations_(std::move(violations)) {}

void RequireValid(const SystemSpec& spec) {
  auto violations = ValidateSystem(spec);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

AttributeProfile GetAttributeProfile(const SystemSpec& spec) {
  AttributeProfile profile;
  profile.reserve(spec.agents.size());
  for (const AgentSpec& agent : spec.agents) profile.push_back(agent.attributes);
  return profile;
}

bool MatchesExcept(const SystemSpec& spec, int x, int y, int attribute) {
  const int n = spec.num_agents();
  if (x < 0 || x >= n || y < 0 || y >= n || attribute < 0 ||
      attribute >= spec.num_attributes()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("matches_except({}, {}, {}) out of range", x, y,
                            attribute));
  }
  const auto& ax = spec.agents[x].attributes;
  const auto& ay = spec.agents[y].attributes;
  if (ax[attribute] != 1 || ay[attribute] != 0) return false;
  for (int a = 0; a < spec.num_attributes(); ++a) {
    if (a != attribute && ax[a] != ay[a]) return false;
  }
  return true;
}

bool ConditionHolds(std::span<const ProfileLiteral> condition,
                    const AttributeProfile& profile) {
  return std::all_of(condition.begin(), condition.end(),
                     [&](const ProfileLiteral& lit) {
                       return profile[lit.agent][lit.attribute] == lit.value;
                     });
}

TransitionIndex::TransitionIndex(const SystemSpec& spec) {
  conditions_.reserve(spec.transition.entries.size());
  for (int e = 0; e < static_cast<int>(spec.transition.entries.size()); ++e) {
    const TransitionEntry& entry = spec.transition.entries[e];
    conditions_.push_back(entry.condition);
    by_key_[{entry.state, entry.joint}].push_back(e);
  }
}

std::vector<int> TransitionIndex::Matching(
    StateId state, std::span<const ActionId> joint,
    const AttributeProfile& profile) const {
  std::vector<int> hits;
  auto it = by_key_.find({state, std::vector<ActionId>(joint.begin(), joint.end())});
  if (it == by_key_.end()) return hits;
  for (int e : it->second) {
    if (ConditionHolds(conditions_[e], profile)) hits.push_back(e);
  }
  return hits;
}

}  // namespace fairmas
