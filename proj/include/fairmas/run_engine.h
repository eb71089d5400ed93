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

#ifndef FAIRMAS_RUN_ENGINE_H_
#define FAIRMAS_RUN_ENGINE_H_

// Bounded runs of a multi-agent system: probabilities, rewards, exact
// expectations by exhaustive enumeration and Monte Carlo estimates.
//
// All expectations are taken over runs of exactly `horizon` steps. The
// OpenMP kernels here have serial counterparts in reference.h which the
// tests hold them against.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fairmas/core_model.h"
#include "fairmas/rng.h"

namespace fairmas {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct ExecutionOptions {
  int threads = 0;  // 0: OpenMP default
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

// A validated system with its transformer resolved against the population's
// own attribute profile and laid out for traversal.
//
// At every state the joint actions with positive probability form a branch
// list in lexicographic order (agent 0 most significant, actions ascending);
// each branch owns its next-state outcomes in ascending state order.
class CompiledSystem {
 public:
  struct Choice {
    ActionId action;
    double prob;
  };
  struct Branch {
    double policy_prob;  // ((1 * pi_0) * pi_1) * ... in agent order
    std::uint32_t joint_offset;
    std::uint32_t outcome_begin;
    std::uint32_t outcome_end;
  };

  // Throws ValidationError for an invalid spec.
  explicit CompiledSystem(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  int num_agents() const { return spec_.num_agents(); }
  int num_states() const { return spec_.num_states; }
  StateId start() const { return spec_.start; }

  std::span<const Choice> Policy(int agent, StateId state) const;
  std::span<const Branch> Branches(StateId state) const;
  std::span<const ActionId> Joint(const Branch& branch) const;
  std::span<const Outcome> Outcomes(const Branch& branch) const;
  std::size_t OutcomeIndex(const Outcome& outcome) const {
    return static_cast<std::size_t>(&outcome - outcomes_.data());
  }
  const Outcome& OutcomeAt(std::size_t index) const { return outcomes_[index]; }
  // Per-agent rewards for taking outcome `index`, n values.
  std::span<const double> OutcomeRewards(std::size_t index) const;

  // Branch for `joint` at `state`, or nullopt when some component has zero
  // policy probability there.
  std::optional<std::size_t> FindBranch(StateId state,
                                        std::span<const ActionId> joint) const;
  const Branch& BranchAt(StateId state, std::size_t index) const {
    return branches_[branch_begin_[state] + index];
  }

  // Largest number of (joint action, next state) children of any state.
  std::uint64_t max_branching() const { return max_branching_; }

 private:
  SystemSpec spec_;
  // Policy supports, indexed by agent * num_states + state.
  std::vector<std::uint32_t> policy_begin_;
  std::vector<Choice> choices_;
  std::vector<std::uint32_t> branch_begin_;  // num_states + 1
  std::vector<Branch> branches_;
  std::vector<ActionId> joints_;
  std::vector<Outcome> outcomes_;
  std::vector<double> outcome_rewards_;  // outcome * n + agent
  std::uint64_t max_branching_ = 0;
};

// max_branching^horizon, saturating at UINT64_MAX.
std::uint64_t RunCountUpperBound(const CompiledSystem& system, int horizon);

// Product over steps of (joint policy probability * transition probability).
// Zero if any factor is zero. Throws kShapeMismatch on malformed runs.
double RunProbability(const CompiledSystem& system, const Run& run);
double RunProbability(const SystemSpec& spec, const Run& run);

// Sum of the agent's state-pair rewards along the run.
double RunReward(const CompiledSystem& system, int agent, const Run& run);
double RunReward(const SystemSpec& spec, int agent, const Run& run);

// Every positive-probability run of exactly `horizon` steps, depth-first with
// joint actions then next states ascending. Throws kEnumerationCapExceeded
// once more than `cap` runs would be produced.
std::vector<Run> EnumerateRuns(const CompiledSystem& system, int horizon,
                               std::uint64_t cap = kDefaultEnumerationCap);
std::vector<Run> EnumerateRuns(const SystemSpec& spec, int horizon,
                               std::uint64_t cap = kDefaultEnumerationCap);

struct EnumerationSummary {
  std::uint64_t runs = 0;
  double probability_mass = 0.0;
  std::vector<double> expected_rewards;  // one per agent
};

// Exact expectations for all agents in one parallel traversal. The tree is
// split into a fixed frontier independent of the worker count and partial
// sums are combined in frontier order, so the result does not depend on
// `options.threads`.
EnumerationSummary EnumerateExact(const CompiledSystem& system, int horizon,
                                  const ExecutionOptions& options = {});

std::vector<double> ExpectedRewardsExact(const CompiledSystem& system,
                                         int horizon,
                                         const ExecutionOptions& options = {});
double ExpectedRewardExact(const SystemSpec& spec, int agent, int horizon,
                           const ExecutionOptions& options = {});

// Forward-samples one run; stream draws are consumed in the order
// (agent 0 action, ..., agent n-1 action, next state) per step.
Run SampleRun(const CompiledSystem& system, int horizon, CounterStream& stream);

// Per-sample, per-agent run rewards; sample i uses CounterStream(seed, i).
struct RewardSamples {
  int num_agents = 0;
  std::uint64_t samples = 0;
  std::vector<double> values;  // sample * num_agents + agent

  double at(std::uint64_t sample, int agent) const {
    return values[sample * num_agents + agent];
  }
};

RewardSamples SampleRewards(const CompiledSystem& system, int horizon,
                            std::uint64_t samples, std::uint64_t seed,
                            const ExecutionOptions& options = {});

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int horizon = 0;

  bool operator==(const EstimatorResult&) const = default;
};

// Two-sided 95% normal quantile.
inline constexpr double kNormalQuantile975 = 1.959963984540054;

// Mean, standard error (sample sd / sqrt(n)) and 95% normal interval of
// `values`, summed in index order.
EstimatorResult Estimate(std::span<const double> values, std::uint64_t seed,
                         int horizon);

std::vector<EstimatorResult> ExpectedRewardsMc(
    const CompiledSystem& system, int horizon, std::uint64_t samples,
    std::uint64_t seed, const ExecutionOptions& options = {});
EstimatorResult ExpectedRewardMc(const SystemSpec& spec, int agent,
                                 int horizon, std::uint64_t samples,
                                 std::uint64_t seed,
                                 const ExecutionOptions& options = {});

namespace internal {

// One forward step shared by every sampler. Returns the outcome index;
// writes the sampled joint action into `joint_out` when it is non-empty.
inline std::size_t SampleOutcome(const CompiledSystem& system, StateId state,
                                 CounterStream& stream,
                                 std::span<ActionId> joint_out) {
  // Horner form of the mixed-radix branch index, agent 0 most significant.
  std::size_t branch = 0;
  for (int x = 0; x < system.num_agents(); ++x) {
    const auto row = system.Policy(x, state);
    const double u = stream.NextUniform();
    std::size_t pick = row.size() - 1;
    double cdf = 0.0;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      cdf += row[k].prob;
      if (u < cdf) {
        pick = k;
        break;
      }
    }
    branch = branch * row.size() + pick;
    if (!joint_out.empty()) joint_out[x] = row[pick].action;
  }
  const auto outcomes = system.Outcomes(system.BranchAt(state, branch));
  const double u = stream.NextUniform();
  std::size_t pick = outcomes.size() - 1;
  double cdf = 0.0;
  for (std::size_t k = 0; k + 1 < outcomes.size(); ++k) {
    cdf += outcomes[k].prob;
    if (u < cdf) {
      pick = k;
      break;
    }
  }
  return system.OutcomeIndex(outcomes[pick]);
}

}  // namespace internal

}  // namespace fairmas

#endif  // FAIRMAS_RUN_ENGINE_H_
