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

#include "fairmas/run_engine.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "fairmas/error.h"
#include "fairmas/reference.h"
#include "fairmas/scenario.h"
#include "fixtures.h"
#include "oracle.h"

namespace fairmas {
namespace {

using testing::CoinSystem;
using testing::DeterministicSystem;
using testing::TwinSystem;

// Two agents, each uniform over {null, go}; every joint moves 0 -> 1 with
// probability 0.7.
SystemSpec TwoCoinAgents() {
  SystemSpec s = TwinSystem();
  for (auto& a : s.agents) a.policy = {{0.5, 0.5}, {0.5, 0.5}};
  for (auto& e : s.transition.entries) e.next = {{0, 0.3}, {1, 0.7}};
  return s;
}

// One agent uniform over two actions; action k moves to state k.
SystemSpec BinaryChoice() {
  SystemSpec s = TwinSystem();
  s.agents.pop_back();
  s.agents[0].policy = {{0.5, 0.5}, {0.5, 0.5}};
  s.transition.entries.clear();
  for (StateId e = 0; e < 2; ++e) {
    for (ActionId a = 0; a < 2; ++a) s.transition.entries.push_back({e, {a}, {}, {{a, 1.0}}});
  }
  return s;
}

SystemSpec UniformNoise() {
  SystemSpec s = BinaryChoice();
  for (auto& e : s.transition.entries) e.next = {{0, 0.5}, {1, 0.5}};
  return s;
}

TEST(RunProbabilityTest, DeterministicIsOne) {
  const SystemSpec s = DeterministicSystem(3);
  const fairmas::Run run{{0, 1, 2}, {{0}, {0}}, 0.0};
  EXPECT_EQ(RunProbability(s, run), 1.0);
}

TEST(RunProbabilityTest, ProductOfFactors) {
  const fairmas::Run run{{0, 1}, {{1, 0}}, 0.0};
  EXPECT_DOUBLE_EQ(RunProbability(TwoCoinAgents(), run), 0.5 * 0.5 * 0.7);

  const fairmas::Run three{{0, 1, 1, 0}, {{1}, {0}, {1}}, 0.0};
  EXPECT_DOUBLE_EQ(RunProbability(UniformNoise(), three), 0.015625);
}

TEST(RunProbabilityTest, InconsistentRunsHaveZeroProbability) {
  const SystemSpec s = BinaryChoice();
  EXPECT_EQ(RunProbability(s, fairmas::Run{{0, 0}, {{1}}, 0.0}), 0.0);
  EXPECT_EQ(RunProbability(s, fairmas::Run{{1, 1}, {{1}}, 0.0}), 0.0);  // wrong start
}

TEST(RunProbabilityTest, MalformedRunsThrow) {
  const SystemSpec s = TwoCoinAgents();
  try {
    RunProbability(s, fairmas::Run{{0, 1}, {{1}}, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(RunProbability(s, fairmas::Run{{0, 1, 0}, {{1, 0}}, 0.0}), Error);
  EXPECT_THROW(RunProbability(s, fairmas::Run{{0, 7}, {{1, 0}}, 0.0}), Error);
}

TEST(RunRewardTest, Examples) {
  SystemSpec s = BinaryChoice();
  for (StateId e = 0; e < 2; ++e) {
    for (StateId f = 0; f < 2; ++f) s.agents[0].rewards[{e, f}] = 1.0;
  }
  const fairmas::Run run{{0, 1, 1, 0}, {{1}, {1}, {0}}, 0.0};
  EXPECT_EQ(RunReward(s, 0, run), 3.0);

  s.agents[0].rewards.clear();
  EXPECT_EQ(RunReward(s, 0, run), 0.0);

  s.agents[0].rewards = {{{0, 1}, 2.0}, {{1, 0}, -1.0}};
  EXPECT_EQ(RunReward(s, 0, fairmas::Run{{0, 1, 0}, {{1}, {0}}, 0.0}), 1.0);
  EXPECT_THROW(RunReward(s, 3, run), Error);
}

TEST(EnumerateRunsTest, DeterministicSingleRun) {
  const auto runs = EnumerateRuns(DeterministicSystem(3), 5);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].probability, 1.0);
  EXPECT_EQ(runs[0].states, (std::vector<StateId>{0, 1, 2, 0, 1, 2}));
}

TEST(EnumerateRunsTest, FourEquiprobableRuns) {
  const auto runs = EnumerateRuns(BinaryChoice(), 2);
  ASSERT_EQ(runs.size(), 4u);
  for (const fairmas::Run& r : runs) EXPECT_EQ(r.probability, 0.25);
  EXPECT_EQ(runs[0].states, (std::vector<StateId>{0, 0, 0}));
  EXPECT_EQ(runs[3].states, (std::vector<StateId>{0, 1, 1}));
}

TEST(EnumerateRunsTest, MatchesBruteForceOracle) {
  const SystemSpec s = TwinSystem();
  const auto runs = EnumerateRuns(s, 2);
  const auto expected = oracle::AllRuns(s, 2);
  ASSERT_EQ(runs.size(), expected.size());
  std::map<std::pair<std::vector<StateId>, std::vector<std::vector<ActionId>>>, double> table;
  for (const auto& r : expected) table[{r.states, r.joints}] = r.probability;
  for (const fairmas::Run& r : runs) {
    auto it = table.find({r.states, r.joint_actions});
    ASSERT_NE(it, table.end());
    EXPECT_NEAR(r.probability, it->second, 1e-15);
  }
}

TEST(EnumerateRunsTest, DepthFirstOrder) {
  const auto runs = EnumerateRuns(TwinSystem(), 2);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto key = [](const fairmas::Run& r) {
      std::vector<std::uint32_t> k;
      for (int t = 0; t < r.horizon(); ++t) {
        k.insert(k.end(), r.joint_actions[t].begin(), r.joint_actions[t].end());
        k.push_back(r.states[t + 1]);
      }
      return k;
    };
    EXPECT_LT(key(runs[i - 1]), key(runs[i]));
  }
}

TEST(EnumerateRunsTest, ProbabilitiesRecomputeExactly) {
  const CompiledSystem system(TwinSystem());
  for (const fairmas::Run& r : EnumerateRuns(system, 3)) {
    EXPECT_EQ(RunProbability(system, r), r.probability);
  }
}

TEST(EnumerateRunsTest, CapExceeded) {
  try {
    EnumerateRuns(BinaryChoice(), 3, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationCapExceeded);
  }
  EXPECT_EQ(EnumerateRuns(BinaryChoice(), 3, 8).size(), 8u);
  const CompiledSystem system(BinaryChoice());
  EXPECT_THROW(EnumerateExact(system, 3, {1, 7}), Error);
  EXPECT_EQ(EnumerateExact(system, 3, {1, 8}).runs, 8u);
}

TEST(EnumerateRunsTest, HorizonMustBePositive) {
  try {
    EnumerateRuns(CoinSystem(), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(ExpectedRewardExactTest, ConstantRewardEqualsHorizon) {
  SystemSpec s = TwinSystem();
  for (auto& a : s.agents) {
    a.rewards.clear();
    for (StateId e = 0; e < 2; ++e) {
      for (StateId f = 0; f < 2; ++f) a.rewards[{e, f}] = 1.0;
    }
  }
  EXPECT_NEAR(ExpectedRewardExact(s, 0, 4), 4.0, 1e-12);
}

TEST(ExpectedRewardExactTest, CoinSystem) {
  EXPECT_DOUBLE_EQ(ExpectedRewardExact(CoinSystem(), 0, 1), 0.7);
}

TEST(ExpectedRewardExactTest, TrafficDefaultsMatchOracle) {
  const auto& golden = testing::TrafficOracle()["lane_off"];
  const CompiledSystem system(traffic::Build({}));
  const auto values = ExpectedRewardsExact(system, 6);
  EXPECT_NEAR(values[0], golden["exp_rew_human"].get<double>(), 1e-9);
  EXPECT_NEAR(values[1], golden["exp_rew_ai"].get<double>(), 1e-9);
}

TEST(EnumerateExactTest, IndependentOfThreadsAndMatchesReference) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CompiledSystem system(testing::RandomSystem(rng));
    const EnumerationSummary serial = reference::EnumerateExact(system, 4);
    const EnumerationSummary one = EnumerateExact(system, 4, {1});
    for (int threads : {2, 3, 4}) {
      const EnumerationSummary many = EnumerateExact(system, 4, {threads});
      EXPECT_EQ(many.runs, one.runs);
      EXPECT_EQ(many.probability_mass, one.probability_mass);
      EXPECT_EQ(many.expected_rewards, one.expected_rewards);
    }
    EXPECT_EQ(one.runs, serial.runs);
    for (std::size_t x = 0; x < serial.expected_rewards.size(); ++x) {
      EXPECT_NEAR(one.expected_rewards[x], serial.expected_rewards[x],
                  1e-12 * std::abs(serial.expected_rewards[x]));
    }
  }
}

TEST(ReferenceTest, EnumerateExactSumsRunsInOrder) {
  const CompiledSystem system(TwinSystem());
  const auto runs = EnumerateRuns(system, 3);
  double mass = 0.0;
  double reward = 0.0;
  for (const fairmas::Run& r : runs) {
    mass += r.probability;
    reward += r.probability * RunReward(system, 0, r);
  }
  const EnumerationSummary serial = reference::EnumerateExact(system, 3);
  EXPECT_EQ(serial.runs, runs.size());
  EXPECT_EQ(serial.probability_mass, mass);
  EXPECT_NEAR(serial.expected_rewards[0], reward, 1e-15);
}

TEST(SampleRunTest, DeterministicSystemGivesUniqueRun) {
  const CompiledSystem system(DeterministicSystem(3));
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    CounterStream stream(seed, 0);
    const fairmas::Run run = SampleRun(system, 4, stream);
    EXPECT_EQ(run.states, (std::vector<StateId>{0, 1, 2, 0, 1}));
    EXPECT_EQ(run.probability, 1.0);
  }
}

TEST(SampleRunTest, FixedSeedIsRepeatable) {
  const CompiledSystem system(CoinSystem());
  CounterStream a(42, 0);
  CounterStream b(42, 0);
  EXPECT_EQ(SampleRun(system, 5, a), SampleRun(system, 5, b));
}

TEST(SampleRunTest, VisitFrequenciesMatchExactProbabilities) {
  const CompiledSystem system(TwinSystem());
  const int horizon = 2;
  const std::uint64_t n = 100000;
  std::map<std::vector<StateId>, double> counts;
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterStream stream(5, i);
    counts[SampleRun(system, horizon, stream).states] += 1.0;
  }
  std::map<std::vector<StateId>, double> exact;
  for (const fairmas::Run& r : EnumerateRuns(system, horizon)) exact[r.states] += r.probability;
  for (const auto& [path, p] : exact) {
    const double freq = counts[path] / n;
    const double se = std::sqrt(p * (1.0 - p) / n);
    EXPECT_LE(std::abs(freq - p), 3.0 * se + 1e-12);
  }
}

TEST(ExpectedRewardMcTest, DeterministicHasNoSpread) {
  const auto result = ExpectedRewardMc(DeterministicSystem(3), 0, 3, 17, 4);
  EXPECT_EQ(result.mean, 3.0);
  EXPECT_EQ(result.std_error, 0.0);
  EXPECT_EQ(result.ci_low, 3.0);
  EXPECT_EQ(result.ci_high, 3.0);
}

TEST(ExpectedRewardMcTest, CoinWithinThreeStandardErrors) {
  const auto result = ExpectedRewardMc(CoinSystem(), 0, 1, 100000, 7);
  EXPECT_LE(std::abs(result.mean - 0.7), 3.0 * result.std_error);
  EXPECT_EQ(result.samples, 100000u);
  EXPECT_EQ(result.seed, 7u);
  EXPECT_EQ(result.horizon, 1);
}

TEST(ExpectedRewardMcTest, RepeatableAndThreadIndependent) {
  const SystemSpec s = TwinSystem();
  const auto first = ExpectedRewardMc(s, 1, 4, 5000, 3, {1});
  EXPECT_EQ(first, ExpectedRewardMc(s, 1, 4, 5000, 3, {1}));
  EXPECT_EQ(first, ExpectedRewardMc(s, 1, 4, 5000, 3, {4}));
}

TEST(ExpectedRewardMcTest, RequiresTwoSamples) {
  EXPECT_THROW(ExpectedRewardMc(CoinSystem(), 0, 1, 1, 0), Error);
}

TEST(SampleRewardsTest, ParallelMatchesReferenceBitwise) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CompiledSystem system(testing::RandomSystem(rng));
    const RewardSamples serial = reference::SampleRewards(system, 4, 3000, 9);
    for (int threads : {1, 4}) {
      EXPECT_EQ(SampleRewards(system, 4, 3000, 9, {threads}).values, serial.values);
    }
  }
}

TEST(EstimateTest, MeanAndInterval) {
  const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
  const EstimatorResult r = Estimate(values, 0, 1);
  EXPECT_EQ(r.mean, 2.5);
  const double se = std::sqrt(5.0 / 3.0) / 2.0;
  EXPECT_DOUBLE_EQ(r.std_error, se);
  EXPECT_DOUBLE_EQ(r.ci_low, 2.5 - kNormalQuantile975 * se);
  EXPECT_DOUBLE_EQ(r.ci_high, 2.5 + kNormalQuantile975 * se);
}

TEST(RunCountUpperBoundTest, SaturatesOnOverflow) {
  const CompiledSystem system(BinaryChoice());
  EXPECT_EQ(RunCountUpperBound(system, 3), 8u);
  EXPECT_EQ(RunCountUpperBound(system, 200), UINT64_MAX);
}

}  // namespace
}  // namespace fairmas
