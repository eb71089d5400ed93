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

#include "fairmas/reference.h"

#include <vector>

#include <fmt/format.h>

#include "fairmas/error.h"

namespace fairmas::reference {
namespace {

class SerialWalker {
 public:
  SerialWalker(const CompiledSystem& system, int horizon, std::uint64_t cap)
      : system_(system),
        n_(system.num_agents()),
        horizon_(horizon),
        cap_(cap),
        rewards_(static_cast<std::size_t>(horizon + 1) * n_, 0.0) {
    summary_.expected_rewards.assign(n_, 0.0);
  }

  EnumerationSummary Run() {
    Visit(system_.start(), 0, 1.0);
    return std::move(summary_);
  }

 private:
  void Visit(StateId state, int depth, double prob) {
    const double* acc = &rewards_[static_cast<std::size_t>(depth) * n_];
    if (depth == horizon_) {
      if (summary_.runs == cap_) {
        throw Error(ErrorCode::kEnumerationCapExceeded,
                    fmt::format("more than {} runs at horizon {}", cap_,
                                horizon_));
      }
      ++summary_.runs;
      summary_.probability_mass += prob;
      for (int x = 0; x < n_; ++x) {
        summary_.expected_rewards[x] += acc[x] * prob;
      }
      return;
    }
    double* child = &rewards_[static_cast<std::size_t>(depth + 1) * n_];
    for (const auto& branch : system_.Branches(state)) {
      for (const Outcome& o : system_.Outcomes(branch)) {
        const auto step = system_.OutcomeRewards(system_.OutcomeIndex(o));
        for (int x = 0; x < n_; ++x) child[x] = acc[x] + step[x];
        Visit(o.next, depth + 1, prob * (branch.policy_prob * o.prob));
      }
    }
  }

  const CompiledSystem& system_;
  int n_;
  int horizon_;
  std::uint64_t cap_;
  std::vector<double> rewards_;
  EnumerationSummary summary_;
};

}  // namespace

EnumerationSummary EnumerateExact(const CompiledSystem& system, int horizon,
                                  std::uint64_t cap) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  return SerialWalker(system, horizon, cap).Run();
}

RewardSamples SampleRewards(const CompiledSystem& system, int horizon,
                            std::uint64_t samples, std::uint64_t seed) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  const int n = system.num_agents();
  RewardSamples out{n, samples,
                    std::vector<double>(static_cast<std::size_t>(samples) * n,
                                        0.0)};
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterStream stream(seed, i);
    double* row = out.values.data() + i * n;
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

}  // namespace fairmas::reference
