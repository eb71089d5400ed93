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

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairmas/error.h"

namespace fairmas {
namespace {

// Subtrees handed to workers; fixed so sums do not depend on thread count.
constexpr std::size_t kFrontierTarget = 256;
// Leaves counted locally before the shared counter is updated.
constexpr std::uint64_t kCapFlushInterval = 4096;

int ResolveThreads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

void CheckHorizon(int horizon) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("horizon must be at least 1, got {}", horizon));
  }
}

void CheckAgent(int agent, int n) {
  if (agent < 0 || agent >= n) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("agent index {} out of range [0, {})", agent, n));
  }
}

[[noreturn]] void ThrowCapExceeded(const CompiledSystem& system, int horizon,
                                   std::uint64_t cap) {
  const std::uint64_t bound = RunCountUpperBound(system, horizon);
  throw Error(ErrorCode::kEnumerationCapExceeded,
              fmt::format("more than {} runs at horizon {} (estimated up to {})",
                          cap, horizon,
                          bound == std::numeric_limits<std::uint64_t>::max()
                              ? std::string("overflow")
                              : std::to_string(bound)));
}

void CheckRunShape(const CompiledSystem& system, const Run& run) {
  const SystemSpec& spec = system.spec();
  if (run.states.size() != run.joint_actions.size() + 1) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("run has {} states and {} joint actions",
                            run.states.size(), run.joint_actions.size()));
  }
  for (StateId s : run.states) {
    if (s >= static_cast<StateId>(spec.num_states)) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("run visits unknown state {}", s));
    }
  }
  for (const auto& joint : run.joint_actions) {
    if (static_cast<int>(joint.size()) != spec.num_agents()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("joint action has {} components for {} agents",
                              joint.size(), spec.num_agents()));
    }
    for (ActionId a : joint) {
      if (a >= static_cast<ActionId>(spec.num_actions())) {
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("run uses unknown action {}", a));
      }
    }
  }
}

// Serial depth-first enumeration into a scratch run.
class RunCollector {
 public:
  RunCollector(const CompiledSystem& system, int horizon, std::uint64_t cap)
      : system_(system), horizon_(horizon), cap_(cap) {
    scratch_.states.assign(horizon + 1, 0);
    scratch_.joint_actions.assign(horizon,
                                  std::vector<ActionId>(system.num_agents()));
  }

  std::vector<Run> Collect() {
    scratch_.states[0] = system_.start();
    Visit(0, 1.0);
    return std::move(runs_);
  }

 private:
  void Visit(int depth, double prob) {
    if (depth == horizon_) {
      if (runs_.size() >= cap_) ThrowCapExceeded(system_, horizon_, cap_);
      scratch_.probability = prob;
      runs_.push_back(scratch_);
      return;
    }
    const StateId state = scratch_.states[depth];
    for (const auto& branch : system_.Branches(state)) {
      const auto joint = system_.Joint(branch);
      std::copy(joint.begin(), joint.end(),
                scratch_.joint_actions[depth].begin());
      for (const Outcome& o : system_.Outcomes(branch)) {
        scratch_.states[depth + 1] = o.next;
        Visit(depth + 1, prob * (branch.policy_prob * o.prob));
      }
    }
  }

  const CompiledSystem& system_;
  int horizon_;
  std::uint64_t cap_;
  Run scratch_;
  std::vector<Run> runs_;
};

struct FrontierNode {
  StateId state;
  double prob;
  std::vector<double> rewards;
};

struct SubtreeSums {
  std::vector<double> weighted;  // per agent: sum of reward * prob
  double mass = 0.0;
  std::uint64_t leaves = 0;
};

class SubtreeWalker {
 public:
  SubtreeWalker(const CompiledSystem& system, int remaining,
                std::uint64_t cap, std::atomic<std::uint64_t>& counted,
                std::atomic<bool>& abort)
      : system_(system),
        n_(system.num_agents()),
        cap_(cap),
        counted_(counted),
        abort_(abort),
        scratch_(static_cast<std::size_t>(remaining + 1) * n_) {}

  SubtreeSums Walk(const FrontierNode& node, int remaining) {
    sums_ = SubtreeSums{std::vector<double>(n_, 0.0), 0.0, 0};
    pending_ = 0;
    std::copy(node.rewards.begin(), node.rewards.end(), scratch_.begin());
    Visit(node.state, remaining, 0, node.prob);
    counted_.fetch_add(pending_, std::memory_order_relaxed);
    return std::move(sums_);
  }

 private:
  void Visit(StateId state, int remaining, int level, double prob) {
    const double* rewards = &scratch_[static_cast<std::size_t>(level) * n_];
    if (remaining == 0) {
      for (int x = 0; x < n_; ++x) sums_.weighted[x] += rewards[x] * prob;
      sums_.mass += prob;
      ++sums_.leaves;
      if (++pending_ == kCapFlushInterval) Flush();
      return;
    }
    double* child = &scratch_[static_cast<std::size_t>(level + 1) * n_];
    for (const auto& branch : system_.Branches(state)) {
      for (const Outcome& o : system_.Outcomes(branch)) {
        if (abort_.load(std::memory_order_relaxed)) return;
        const auto step = system_.OutcomeRewards(system_.OutcomeIndex(o));
        for (int x = 0; x < n_; ++x) child[x] = rewards[x] + step[x];
        Visit(o.next, remaining - 1, level + 1,
              prob * (branch.policy_prob * o.prob));
      }
    }
  }

  void Flush() {
    const auto total =
        counted_.fetch_add(pending_, std::memory_order_relaxed) + pending_;
    pending_ = 0;
    if (total > cap_) abort_.store(true, std::memory_order_relaxed);
  }

  const CompiledSystem& system_;
  int n_;
  std::uint64_t cap_;
  std::atomic<std::uint64_t>& counted_;
  std::atomic<bool>& abort_;
  std::vector<double> scratch_;
  SubtreeSums sums_;
  std::uint64_t pending_ = 0;
};

}  // namespace

CompiledSystem::CompiledSystem(SystemSpec spec) : spec_(std::move(spec)) {
  RequireValid(spec_);
  const int n = spec_.num_agents();
  const int num_states = spec_.num_states;

  policy_begin_.reserve(static_cast<std::size_t>(n) * num_states + 1);
  for (int x = 0; x < n; ++x) {
    for (int s = 0; s < num_states; ++s) {
      policy_begin_.push_back(static_cast<std::uint32_t>(choices_.size()));
      const auto& row = spec_.agents[x].policy[s];
      for (std::size_t a = 0; a < row.size(); ++a) {
        if (row[a] > 0.0) choices_.push_back({static_cast<ActionId>(a), row[a]});
      }
    }
  }
  policy_begin_.push_back(static_cast<std::uint32_t>(choices_.size()));

  const TransitionIndex index(spec_);
  const AttributeProfile profile = GetAttributeProfile(spec_);
  std::vector<ActionId> joint(n);
  std::vector<std::size_t> digit(n);
  for (int s = 0; s < num_states; ++s) {
    branch_begin_.push_back(static_cast<std::uint32_t>(branches_.size()));
    std::size_t combos = 1;
    for (int x = 0; x < n; ++x) combos *= Policy(x, s).size();
    std::fill(digit.begin(), digit.end(), 0);
    std::uint64_t children = 0;
    for (std::size_t c = 0; c < combos; ++c) {
      Branch branch{1.0, static_cast<std::uint32_t>(joints_.size()), 0, 0};
      for (int x = 0; x < n; ++x) {
        const Choice& choice = Policy(x, s)[digit[x]];
        branch.policy_prob *= choice.prob;
        joint[x] = choice.action;
      }
      joints_.insert(joints_.end(), joint.begin(), joint.end());
      // Validation guarantees exactly one match.
      const int e = index.Matching(static_cast<StateId>(s), joint, profile)[0];
      branch.outcome_begin = static_cast<std::uint32_t>(outcomes_.size());
      for (const Outcome& o : spec_.transition.entries[e].next) {
        if (o.prob <= 0.0) continue;
        outcomes_.push_back(o);
        for (int x = 0; x < n; ++x) {
          const auto& rewards = spec_.agents[x].rewards;
          auto it = rewards.find({static_cast<StateId>(s), o.next});
          outcome_rewards_.push_back(it == rewards.end() ? 0.0 : it->second);
        }
      }
      branch.outcome_end = static_cast<std::uint32_t>(outcomes_.size());
      children += branch.outcome_end - branch.outcome_begin;
      branches_.push_back(branch);
      for (int x = n - 1; x >= 0; --x) {
        if (++digit[x] < Policy(x, s).size()) break;
        digit[x] = 0;
      }
    }
    max_branching_ = std::max(max_branching_, children);
    if (outcomes_.size() > std::numeric_limits<std::uint32_t>::max() / 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "transition structure too large to compile");
    }
  }
  branch_begin_.push_back(static_cast<std::uint32_t>(branches_.size()));
}

std::span<const CompiledSystem::Choice> CompiledSystem::Policy(
    int agent, StateId state) const {
  const std::size_t k =
      static_cast<std::size_t>(agent) * spec_.num_states + state;
  return {choices_.data() + policy_begin_[k],
          choices_.data() + policy_begin_[k + 1]};
}

std::span<const CompiledSystem::Branch> CompiledSystem::Branches(
    StateId state) const {
  return {branches_.data() + branch_begin_[state],
          branches_.data() + branch_begin_[state + 1]};
}

std::span<const ActionId> CompiledSystem::Joint(const Branch& branch) const {
  return {joints_.data() + branch.joint_offset,
          static_cast<std::size_t>(num_agents())};
}

std::span<const Outcome> CompiledSystem::Outcomes(const Branch& branch) const {
  return {outcomes_.data() + branch.outcome_begin,
          outcomes_.data() + branch.outcome_end};
}

std::span<const double> CompiledSystem::OutcomeRewards(std::size_t index) const {
  return {outcome_rewards_.data() + index * num_agents(),
          static_cast<std::size_t>(num_agents())};
}

std::optional<std::size_t> CompiledSystem::FindBranch(
    StateId state, std::span<const ActionId> joint) const {
  std::size_t branch = 0;
  for (int x = 0; x < num_agents(); ++x) {
    const auto row = Policy(x, state);
    auto it = std::find_if(row.begin(), row.end(), [&](const Choice& c) {
      return c.action == joint[x];
    });
    if (it == row.end()) return std::nullopt;
    branch = branch * row.size() + static_cast<std::size_t>(it - row.begin());
  }
  return branch;
}

std::uint64_t RunCountUpperBound(const CompiledSystem& system, int horizon) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t bound = 1;
  const std::uint64_t b = std::max<std::uint64_t>(system.max_branching(), 1);
  for (int i = 0; i < horizon; ++i) {
    if (bound > kMax / b) return kMax;
    bound *= b;
  }
  return bound;
}

double RunProbability(const CompiledSystem& system, const Run& run) {
  CheckRunShape(system, run);
  if (run.states.front() != system.start()) return 0.0;
  double prob = 1.0;
  for (std::size_t i = 0; i < run.joint_actions.size(); ++i) {
    const StateId state = run.states[i];
    const auto b = system.FindBranch(state, run.joint_actions[i]);
    if (!b) return 0.0;
    const auto& branch = system.BranchAt(state, *b);
    const auto outcomes = system.Outcomes(branch);
    auto it = std::find_if(outcomes.begin(), outcomes.end(),
                           [&](const Outcome& o) {
                             return o.next == run.states[i + 1];
                           });
    if (it == outcomes.end()) return 0.0;
    prob *= branch.policy_prob * it->prob;
  }
  return prob;
}

double RunProbability(const SystemSpec& spec, const Run& run) {
  return RunProbability(CompiledSystem(spec), run);
}

double RunReward(const CompiledSystem& system, int agent, const Run& run) {
  CheckRunShape(system, run);
  CheckAgent(agent, system.num_agents());
  const auto& rewards = system.spec().agents[agent].rewards;
  double total = 0.0;
  for (std::size_t i = 1; i < run.states.size(); ++i) {
    auto it = rewards.find({run.states[i - 1], run.states[i]});
    if (it != rewards.end()) total += it->second;
  }
  return total;
}

double RunReward(const SystemSpec& spec, int agent, const Run& run) {
  return RunReward(CompiledSystem(spec), agent, run);
}

std::vector<Run> EnumerateRuns(const CompiledSystem& system, int horizon,
                               std::uint64_t cap) {
  CheckHorizon(horizon);
  return RunCollector(system, horizon, cap).Collect();
}

std::vector<Run> EnumerateRuns(const SystemSpec& spec, int horizon,
                               std::uint64_t cap) {
  return EnumerateRuns(CompiledSystem(spec), horizon, cap);
}

EnumerationSummary EnumerateExact(const CompiledSystem& system, int horizon,
                                  const ExecutionOptions& options) {
  CheckHorizon(horizon);
  const int n = system.num_agents();
  const std::uint64_t cap = options.enumeration_cap;

  // Level-order expansion keeps frontier nodes in depth-first order.
  std::vector<FrontierNode> frontier{
      {system.start(), 1.0, std::vector<double>(n, 0.0)}};
  int depth = 0;
  while (depth < horizon && frontier.size() < kFrontierTarget) {
    std::vector<FrontierNode> next;
    for (const FrontierNode& node : frontier) {
      for (const auto& branch : system.Branches(node.state)) {
        for (const Outcome& o : system.Outcomes(branch)) {
          FrontierNode child{o.next, node.prob * (branch.policy_prob * o.prob),
                             node.rewards};
          const auto step = system.OutcomeRewards(system.OutcomeIndex(o));
          for (int x = 0; x < n; ++x) child.rewards[x] += step[x];
          next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
    ++depth;
    // Every node has at least one child, so leaves >= frontier size.
    if (frontier.size() > cap) ThrowCapExceeded(system, horizon, cap);
  }

  const int remaining = horizon - depth;
  std::vector<SubtreeSums> partial(frontier.size());
  std::atomic<std::uint64_t> counted{0};
  std::atomic<bool> abort{false};
  const auto count = static_cast<std::int64_t>(frontier.size());

#pragma omp parallel num_threads(ResolveThreads(options.threads))
  {
    SubtreeWalker walker(system, remaining, cap, counted, abort);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
      partial[i] = walker.Walk(frontier[i], remaining);
    }
  }

  EnumerationSummary summary;
  summary.expected_rewards.assign(n, 0.0);
  for (const SubtreeSums& part : partial) {
    summary.runs += part.leaves;
    summary.probability_mass += part.mass;
    for (int x = 0; x < n; ++x) summary.expected_rewards[x] += part.weighted[x];
  }
  if (abort.load() || summary.runs > cap) {
    ThrowCapExceeded(system, horizon, cap);
  }
  return summary;
}

std::vector<double> ExpectedRewardsExact(const CompiledSystem& system,
                                         int horizon,
                                         const ExecutionOptions& options) {
  return EnumerateExact(system, horizon, options).expected_rewards;
}

double ExpectedRewardExact(const SystemSpec& spec, int agent, int horizon,
                           const ExecutionOptions& options) {
  const CompiledSystem system(spec);
  CheckAgent(agent, system.num_agents());
  return ExpectedRewardsExact(system, horizon, options)[agent];
}

Run SampleRun(const CompiledSystem& system, int horizon,
              CounterStream& stream) {
  CheckHorizon(horizon);
  Run run;
  run.states.reserve(horizon + 1);
  run.states.push_back(system.start());
  run.joint_actions.assign(horizon, std::vector<ActionId>(system.num_agents()));
  for (int i = 0; i < horizon; ++i) {
    const std::size_t o = internal::SampleOutcome(
        system, run.states.back(), stream, run.joint_actions[i]);
    run.states.push_back(system.OutcomeAt(o).next);
  }
  run.probability = RunProbability(system, run);
  return run;
}

RewardSamples SampleRewards(const CompiledSystem& system, int horizon,
                            std::uint64_t samples, std::uint64_t seed,
                            const ExecutionOptions& options) {
  CheckHorizon(horizon);
  const int n = system.num_agents();
  RewardSamples out{n, samples,
                    std::vector<double>(static_cast<std::size_t>(samples) * n,
                                        0.0)};
  const auto count = static_cast<std::int64_t>(samples);

#pragma omp parallel for schedule(static) \
    num_threads(ResolveThreads(options.threads))
  for (std::int64_t i = 0; i < count; ++i) {
    CounterStream stream(seed, static_cast<std::uint64_t>(i));
    double* row = out.values.data() + static_cast<std::size_t>(i) * n;
    StateId state = system.start();
    for (int step = 0; step < horizon; ++step) {
      const std::size_t o =
          internal::SampleOutcome(system, state, stream, {});
      const auto rewards = system.OutcomeRewards(o);
      for (int x = 0; x < n; ++x) row[x] += rewards[x];
      state = system.OutcomeAt(o).next;
    }
  }
  return out;
}

EstimatorResult Estimate(std::span<const double> values, std::uint64_t seed,
                         int horizon) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no samples to estimate from");
  }
  const auto count = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / count;
  double squares = 0.0;
  for (double v : values) squares += (v - mean) * (v - mean);
  const double variance = values.size() > 1 ? squares / (count - 1.0) : 0.0;
  const double std_error = std::sqrt(variance / count);
  return {mean,
          std_error,
          mean - kNormalQuantile975 * std_error,
          mean + kNormalQuantile975 * std_error,
          values.size(),
          seed,
          horizon};
}

std::vector<EstimatorResult> ExpectedRewardsMc(const CompiledSystem& system,
                                               int horizon,
                                               std::uint64_t samples,
                                               std::uint64_t seed,
                                               const ExecutionOptions& options) {
  if (samples < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("need at least 2 samples, got {}", samples));
  }
  const RewardSamples draws =
      SampleRewards(system, horizon, samples, seed, options);
  std::vector<EstimatorResult> results;
  std::vector<double> column(samples);
  for (int x = 0; x < system.num_agents(); ++x) {
    for (std::uint64_t i = 0; i < samples; ++i) column[i] = draws.at(i, x);
    results.push_back(Estimate(column, seed, horizon));
  }
  return results;
}

EstimatorResult ExpectedRewardMc(const SystemSpec& spec, int agent,
                                 int horizon, std::uint64_t samples,
                                 std::uint64_t seed,
                                 const ExecutionOptions& options) {
  const CompiledSystem system(spec);
  CheckAgent(agent, system.num_agents());
  return ExpectedRewardsMc(system, horizon, samples, seed, options)[agent];
}

}  // namespace fairmas
