#!/usr/bin/env python3
# Copyright 2026 The fairmas Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent oracle for the traffic scenario.

Cars never interact, so each car's expected reward is a one-dimensional
Markov chain over its own position. This script evaluates that chain with
exact rationals and never looks at the joint-state encoding used by the
C++ generator. Its output is frozen into tests/golden/traffic_oracle.json.
"""

import json
import sys
from fractions import Fraction as F

DEFAULTS = dict(
    corridor_length=3,
    fast_route_gain=F(9, 10),
    human_gain=F(6, 10),
    slow_route_gain=F(1, 2),
    arrival_reward=F(10),
    step_cost=F(-1),
    ai_fast_prob=F(8, 10),
    human_fast_prob=F(5, 10),
)


def success_prob(policy_human, dynamics_human, lane, p):
    """Per-step advance probability.

    policy_human selects the car's policy (policies never change in a
    counterfactual); dynamics_human selects how the road treats it.
    """
    fast = p["human_fast_prob"] if policy_human else p["ai_fast_prob"]
    if dynamics_human:
        fast_gain = p["human_gain"]
    else:
        fast_gain = p["slow_route_gain"] if lane else p["fast_route_gain"]
    return fast * fast_gain + (1 - fast) * p["slow_route_gain"]


def expected_reward(q, horizon, p):
    length = p["corridor_length"]
    dist = {0: F(1)}
    total = F(0)
    for _ in range(horizon):
        nxt = {}
        for pos, mass in dist.items():
            if pos == length:
                nxt[pos] = nxt.get(pos, 0) + mass
                continue
            up = pos + 1
            gain = p["arrival_reward"] if up == length else p["step_cost"]
            total += mass * q * gain + mass * (1 - q) * p["step_cost"]
            nxt[up] = nxt.get(up, 0) + mass * q
            nxt[pos] = nxt.get(pos, 0) + mass * (1 - q)
        dist = nxt
    return total


def car_reward(human, lane, horizon, p, flipped=False):
    dyn = (not human) if flipped else human
    return expected_reward(success_prob(human, dyn, lane, p), horizon, p)


def main():
    p = dict(DEFAULTS)
    out = {}
    H = 6
    for lane in (False, True):
        tag = "lane_on" if lane else "lane_off"
        human = car_reward(True, lane, H, p)
        ai = car_reward(False, lane, H, p)
        human_cf = car_reward(True, lane, H, p, flipped=True)
        out[tag] = {
            "horizon": H,
            "exp_rew_human": float(human),
            "exp_rew_ai": float(ai),
            "dem_par": float(human - ai),
            "count_fair": float(human - human_cf),
        }
    # Four cars (human/high, ai/high, human/low, ai/low) on a length-1 corridor.
    p1 = dict(p, corridor_length=1)
    h, a = car_reward(True, False, 3, p1), car_reward(False, False, 3, p1)
    out["four_car_l1_h3"] = {
        "horizon": 3,
        "dem_par": float(2 * (h - a)),
        "cond_sp_high_speed": float(h - a),
    }
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
