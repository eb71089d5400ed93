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

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "fairmas/error.h"
#include "fairmas/scenario.h"

namespace fairmas::traffic {
namespace {

// Joint actions across all states, before profile conditions multiply them.
constexpr double kMaxJointActions = 2e6;

bool InUnit(double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; }

struct Layout {
  int length;
  int cars;
  int states;

  int Position(int state, int car) const {
    for (int i = 0; i < car; ++i) state /= (length + 1);
    return state % (length + 1);
  }
  int Stride(int car) const {
    int s = 1;
    for (int i = 0; i < car; ++i) s *= (length + 1);
    return s;
  }
};

struct CarMove {
  int from;
  double success;  // 0 for a car that does not move
};

// Independent per-car outcomes, multiplied in car order, ascending states.
std::vector<Outcome> Combine(const Layout& layout, int state,
                             const std::vector<CarMove>& moves) {
  std::vector<Outcome> dist{{static_cast<StateId>(state), 1.0}};
  for (int c = 0; c < layout.cars; ++c) {
    const double g = moves[c].success;
    if (g == 0.0) continue;
    std::vector<Outcome> next;
    for (const Outcome& o : dist) {
      if (g < 1.0) next.push_back({o.next, o.prob * (1.0 - g)});
      next.push_back(
          {o.next + static_cast<StateId>(layout.Stride(c)), o.prob * g});
    }
    dist = std::move(next);
  }
  std::sort(dist.begin(), dist.end(),
            [](const Outcome& a, const Outcome& b) { return a.next < b.next; });
  return dist;
}

}  // namespace

void CheckParams(const Params& params) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, "traffic: " + msg);
  };
  if (params.corridor_length < 1) fail("corridor_length must be at least 1");
  if (params.cars.empty()) fail("at least one car is required");
  if (!InUnit(params.fast_route_gain)) fail("fast_route_gain must be in (0, 1]");
  if (!InUnit(params.human_gain)) fail("human_gain must be in (0, 1]");
  if (!InUnit(params.slow_route_gain)) fail("slow_route_gain must be in (0, 1]");
  for (double p : {params.ai_fast_prob, params.human_fast_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("route choice probabilities must be in [0, 1]");
  }
  if (!std::isfinite(params.arrival_reward) || !std::isfinite(params.step_cost)) {
    fail("rewards must be finite");
  }
  const double states =
      std::pow(params.corridor_length + 1.0, static_cast<double>(params.cars.size()));
  const double joint = states * std::pow(2.0, static_cast<double>(params.cars.size()));
  if (joint > kMaxJointActions) {
    fail(fmt::format("{} cars on a corridor of length {} is too large to tabulate",
                     params.cars.size(), params.corridor_length));
  }
}

SystemSpec Build(const Params& params) {
  CheckParams(params);
  const int n = static_cast<int>(params.cars.size());
  const int length = params.corridor_length;
  int num_states = 1;
  for (int c = 0; c < n; ++c) num_states *= length + 1;
  const Layout layout{length, n, num_states};

  SystemSpec spec;
  spec.num_states = num_states;
  spec.start = 0;
  spec.action_names = {"null", "advance_fast", "advance_slow"};
  spec.attribute_names = {"human_driven", "high_speed"};
  spec.protected_attributes = {kHumanDriven};
  for (int s = 0; s < num_states; ++s) {
    std::string name;
    for (int c = 0; c < n; ++c) {
      name += (c ? "-" : "") + std::to_string(layout.Position(s, c));
    }
    spec.state_names.push_back(std::move(name));
  }

  for (int c = 0; c < n; ++c) {
    const Car& car = params.cars[c];
    AgentSpec agent;
    agent.attributes = {static_cast<std::uint8_t>(car.human_driven),
                        static_cast<std::uint8_t>(car.high_speed)};
    agent.actions = {kNullAction, kAdvanceFast, kAdvanceSlow};
    const double fast = car.human_driven ? params.human_fast_prob : params.ai_fast_prob;
    for (int s = 0; s < num_states; ++s) {
      std::vector<double> row(3, 0.0);
      if (layout.Position(s, c) < length) {
        row[kAdvanceFast] = fast;
        row[kAdvanceSlow] = 1.0 - fast;
      } else {
        row[kNullAction] = 1.0;
      }
      agent.policy.push_back(std::move(row));
    }
    spec.agents.push_back(std::move(agent));
  }

  // Fast-route success for a car whose human_driven bit is `human`.
  const double ai_fast_gain =
      params.dedicated_lane ? params.slow_route_gain : params.fast_route_gain;
  auto fast_gain = [&](bool human) {
    return human ? params.human_gain : ai_fast_gain;
  };
  const bool sensitive = fast_gain(true) != fast_gain(false);
  spec.transition.attribute_sensitive = sensitive;

  for (int s = 0; s < num_states; ++s) {
    // Rewards: every car that has not arrived pays the step cost, or
    // collects the arrival reward on the step that reaches the end.
    std::vector<int> moving;
    for (int c = 0; c < n; ++c) {
      if (layout.Position(s, c) < length) moving.push_back(c);
    }
    const int m = static_cast<int>(moving.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
      int to = s;
      for (int k = 0; k < m; ++k) {
        if (mask & (1 << k)) to += layout.Stride(moving[k]);
      }
      for (int k = 0; k < m; ++k) {
        const int c = moving[k];
        const double value = layout.Position(to, c) == length
                                 ? params.arrival_reward
                                 : params.step_cost;
        if (value != 0.0) {
          spec.agents[c].rewards[{static_cast<StateId>(s), static_cast<StateId>(to)}] =
              value;
        }
      }
    }

    // Transitions: moving cars pick fast or slow, arrived cars idle.
    for (int route_mask = 0; route_mask < (1 << m); ++route_mask) {
      std::vector<ActionId> joint(n, kNullAction);
      std::vector<int> on_fast;
      for (int k = 0; k < m; ++k) {
        const bool fast = (route_mask >> (m - 1 - k)) & 1;
        joint[moving[k]] = fast ? kAdvanceFast : kAdvanceSlow;
        if (fast) on_fast.push_back(moving[k]);
      }
      const int conditioned = sensitive ? static_cast<int>(on_fast.size()) : 0;
      for (int bits = 0; bits < (1 << conditioned); ++bits) {
        TransitionEntry entry;
        entry.state = static_cast<StateId>(s);
        entry.joint = joint;
        std::vector<CarMove> moves(n, CarMove{0, 0.0});
        for (int c : moving) {
          const bool fast = joint[c] == kAdvanceFast;
          moves[c].success = fast ? fast_gain(params.cars[c].human_driven)
                                  : params.slow_route_gain;
        }
        for (int k = 0; k < conditioned; ++k) {
          const int c = on_fast[k];
          const bool human = (bits >> (conditioned - 1 - k)) & 1;
          entry.condition.push_back(
              {c, kHumanDriven, static_cast<std::uint8_t>(human)});
          moves[c].success = fast_gain(human);
        }
        entry.next = Combine(layout, s, moves);
        spec.transition.entries.push_back(std::move(entry));
      }
    }
  }
  return spec;
}

std::vector<Car> ParseCars(std::string_view text) {
  std::vector<Car> cars;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    const std::string_view driver = item.substr(0, colon);
    const std::string_view speed =
        colon == std::string_view::npos ? "high" : item.substr(colon + 1);
    Car car;
    if (driver == "human") {
      car.human_driven = true;
    } else if (driver != "ai") {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("car '{}': driver must be human or ai", item));
    }
    if (speed == "low") {
      car.high_speed = false;
    } else if (speed != "high") {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("car '{}': speed tier must be high or low", item));
    }
    cars.push_back(car);
    pos = comma + 1;
  }
  return cars;
}

std::string FormatCars(const std::vector<Car>& cars) {
  std::string out;
  for (std::size_t i = 0; i < cars.size(); ++i) {
    out += fmt::format("{}{}:{}", i ? "," : "",
                       cars[i].human_driven ? "human" : "ai",
                       cars[i].high_speed ? "high" : "low");
  }
  return out;
}

}  // namespace fairmas::traffic
