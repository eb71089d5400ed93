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

#include "fixtures.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace fairmas::testing {
namespace {

std::vector<std::vector<double>> Constant(int states, int actions,
                                          std::vector<double> row) {
  row.resize(actions, 0.0);
  return std::vector<std::vector<double>>(states, row);
}

// Probabilities proportional to `weights`, last one absorbing the remainder.
std::vector<double> Normalize(const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> out(weights.size());
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    out[i] = weights[i] / total;
    used += out[i];
  }
  out.back() = 1.0 - used;
  return out;
}

}  // namespace

SystemSpec CoinSystem() {
  SystemSpec s;
  s.num_states = 2;
  s.action_names = {"null"};
  s.attribute_names = {"pr", "other"};
  s.protected_attributes = {0};
  AgentSpec a;
  a.attributes = {1, 0};
  a.actions = {0};
  a.policy = Constant(2, 1, {1.0});
  a.rewards[{0, 1}] = 1.0;
  s.agents = {a};
  s.transition.entries = {
      {0, {0}, {}, {{0, 0.3}, {1, 0.7}}},
      {1, {0}, {}, {{1, 1.0}}},
  };
  return s;
}

SystemSpec TwinSystem() {
  SystemSpec s;
  s.num_states = 2;
  s.action_names = {"null", "go"};
  s.attribute_names = {"pr", "other"};
  s.protected_attributes = {0};
  AgentSpec a;
  a.attributes = {1, 1};
  a.actions = {0, 1};
  a.policy = Constant(2, 2, {0.4, 0.6});
  a.rewards[{0, 1}] = 2.0;
  a.rewards[{1, 0}] = -1.0;
  a.rewards[{1, 1}] = 0.5;
  AgentSpec b = a;
  b.attributes = {0, 1};
  s.agents = {a, b};
  for (StateId e = 0; e < 2; ++e) {
    for (ActionId x = 0; x < 2; ++x) {
      for (ActionId y = 0; y < 2; ++y) {
        const double move = 0.2 + 0.3 * (x + y);
        s.transition.entries.push_back(
            {e, {x, y}, {}, {{0, e == 0 ? 1.0 - move : move}, {1, e == 0 ? move : 1.0 - move}}});
      }
    }
  }
  return s;
}

SystemSpec DeterministicSystem(int num_states, double reward) {
  SystemSpec s;
  s.num_states = num_states;
  s.action_names = {"null"};
  s.attribute_names = {"pr", "other"};
  s.protected_attributes = {0};
  AgentSpec a;
  a.attributes = {1, 0};
  a.actions = {0};
  a.policy = Constant(num_states, 1, {1.0});
  for (int e = 0; e < num_states; ++e) {
    const StateId next = static_cast<StateId>((e + 1) % num_states);
    a.rewards[{static_cast<StateId>(e), next}] = reward;
    s.transition.entries.push_back({static_cast<StateId>(e), {0}, {}, {{next, 1.0}}});
  }
  s.agents = {a};
  return s;
}

SystemSpec RandomSystem(std::mt19937_64& rng,
                        const RandomSystemOptions& options) {
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  SystemSpec s;
  s.num_states = uniform_int(std::min(2, options.max_states), options.max_states);
  s.start = static_cast<StateId>(uniform_int(0, s.num_states - 1));
  const int num_actions = uniform_int(std::min(2, options.max_actions), options.max_actions);
  for (int a = 0; a < num_actions; ++a) s.action_names.push_back("a" + std::to_string(a));
  s.attribute_names = {"pr", "f"};
  s.protected_attributes = {0};
  const int num_agents = uniform_int(1, options.max_agents);

  for (int x = 0; x < num_agents; ++x) {
    AgentSpec agent;
    agent.attributes = {static_cast<std::uint8_t>(uniform_int(0, 1)),
                        static_cast<std::uint8_t>(uniform_int(0, 1))};
    agent.actions = {kNullAction};
    for (ActionId a = 1; a < static_cast<ActionId>(num_actions); ++a) {
      if (uniform_int(0, 3) != 0) agent.actions.push_back(a);
    }
    agent.policy.assign(s.num_states, std::vector<double>(num_actions, 0.0));
    for (int e = 0; e < s.num_states; ++e) {
      std::vector<ActionId> support = agent.actions;
      std::shuffle(support.begin(), support.end(), rng);
      support.resize(std::min<std::size_t>(
          support.size(), uniform_int(1, options.max_support)));
      std::vector<double> weights;
      for (std::size_t k = 0; k < support.size(); ++k) weights.push_back(uniform(0.1, 1.0));
      const auto probs = Normalize(weights);
      for (std::size_t k = 0; k < support.size(); ++k) {
        agent.policy[e][support[k]] = probs[k];
      }
    }
    for (int e = 0; e < s.num_states; ++e) {
      for (int f = 0; f < s.num_states; ++f) {
        if (uniform_int(0, 2) == 0) continue;
        const double r = options.signed_rewards ? uniform(-2.0, 2.0) : uniform(0.1, 2.0);
        agent.rewards[{static_cast<StateId>(e), static_cast<StateId>(f)}] = r;
      }
    }
    s.agents.push_back(std::move(agent));
  }

  auto random_outcomes = [&]() {
    std::vector<Outcome> next;
    std::vector<double> weights;
    for (int f = 0; f < s.num_states; ++f) {
      if (uniform_int(0, 2) == 0 && !(f + 1 == s.num_states && next.empty())) continue;
      next.push_back({static_cast<StateId>(f), 0.0});
      weights.push_back(uniform(0.1, 1.0));
    }
    const auto probs = Normalize(weights);
    for (std::size_t k = 0; k < next.size(); ++k) next[k].prob = probs[k];
    return next;
  };

  s.transition.attribute_sensitive =
      options.allow_sensitive && uniform_int(0, 1) == 1;
  for (int e = 0; e < s.num_states; ++e) {
    // Every joint over the agents' available actions, agent 0 most significant.
    std::vector<std::size_t> digit(num_agents, 0);
    while (true) {
      std::vector<ActionId> joint(num_agents);
      for (int x = 0; x < num_agents; ++x) joint[x] = s.agents[x].actions[digit[x]];
      if (s.transition.attribute_sensitive && uniform_int(0, 1) == 1) {
        const int who = uniform_int(0, num_agents - 1);
        const int what = uniform_int(0, 1);
        for (std::uint8_t v = 0; v < 2; ++v) {
          s.transition.entries.push_back(
              {static_cast<StateId>(e), joint, {{who, what, v}}, random_outcomes()});
        }
      } else {
        s.transition.entries.push_back(
            {static_cast<StateId>(e), joint, {}, random_outcomes()});
      }
      int x = num_agents - 1;
      while (x >= 0 && ++digit[x] == s.agents[x].actions.size()) digit[x--] = 0;
      if (x < 0) break;
    }
  }
  return s;
}

ConfigSpace SyntheticSpace() {
  ConfigSpace space;
  space.family = "synthetic";
  space.params = {{"p", ParamKind::kReal, 0.0, 1.0}};
  space.binder = [](std::span<const double> config) {
    SystemSpec s;
    s.num_states = 2;
    s.action_names = {"null"};
    s.attribute_names = {"pr", "other"};
    s.protected_attributes = {0};
    AgentSpec x;
    x.attributes = {1, 0};
    x.actions = {0};
    x.policy = Constant(2, 1, {1.0});
    AgentSpec y = x;
    y.attributes = {0, 0};
    if (config[0] != 0.0) x.rewards[{0, 1}] = config[0];
    y.rewards[{0, 1}] = 0.5;
    s.agents = {x, y};
    s.transition.entries = {{0, {0, 0}, {}, {{1, 1.0}}},
                            {1, {0, 0}, {}, {{1, 1.0}}}};
    return s;
  };
  return space;
}

const nlohmann::json& TrafficOracle() {
  static const nlohmann::json golden = [] {
    std::ifstream in(std::string(FAIRMAS_SOURCE_DIR) +
                     "/tests/golden/traffic_oracle.json");
    return nlohmann::json::parse(in);
  }();
  return golden;
}

}  // namespace fairmas::testing
