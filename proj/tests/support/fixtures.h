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

#ifndef FAIRMAS_TESTS_SUPPORT_FIXTURES_H_
#define FAIRMAS_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <random>

#include "fairmas/core_model.h"
#include "fairmas/optimizer.h"
#include "json.hpp"

namespace fairmas::testing {

// One agent; from state 0 the system moves to state 1 with probability 0.7
// (reward 1) or stays (reward 0); both states absorb afterwards. Attributes
// (pr, other) with pr protected.
SystemSpec CoinSystem();

// Two agents with identical policies and rewards that differ only in the
// protected bit; attribute-insensitive stochastic dynamics.
SystemSpec TwinSystem();

// Deterministic cycle over `num_states` states; every transition pays
// `reward` to the single agent.
SystemSpec DeterministicSystem(int num_states = 3, double reward = 1.0);

struct RandomSystemOptions {
  int max_states = 4;
  int max_actions = 3;  // including the null action
  int max_agents = 3;
  int max_support = 2;  // actions with positive policy probability
  bool allow_sensitive = true;
  bool signed_rewards = false;
};

// Valid random system with two attributes, the first protected.
SystemSpec RandomSystem(std::mt19937_64& rng,
                        const RandomSystemOptions& options = {});

// Two agents (pr = 1, pr = 0), one step 0 -> 1; agent 0 earns p on that
// step and agent 1 earns 0.5, so DemPar = p - 0.5.
ConfigSpace SyntheticSpace();

// Frozen values from tests/oracles/traffic_oracle.py.
const nlohmann::json& TrafficOracle();

}  // namespace fairmas::testing

#endif  // FAIRMAS_TESTS_SUPPORT_FIXTURES_H_
