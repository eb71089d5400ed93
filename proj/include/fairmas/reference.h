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

#ifndef FAIRMAS_REFERENCE_H_
#define FAIRMAS_REFERENCE_H_

// Single-threaded versions of the run-engine kernels. They accumulate in
// plain depth-first (or sample-index) order and are kept as the baseline the
// parallel kernels are tested and benchmarked against.

#include <cstdint>

#include "fairmas/run_engine.h"

namespace fairmas::reference {

// Leaf-order sums: expected_rewards[x] equals the in-order sum of
// RunReward(x, r) * r.probability over EnumerateRuns, bit for bit.
EnumerationSummary EnumerateExact(const CompiledSystem& system, int horizon,
                                  std::uint64_t cap = kDefaultEnumerationCap);

RewardSamples SampleRewards(const CompiledSystem& system, int horizon,
                            std::uint64_t samples, std::uint64_t seed);

}  // namespace fairmas::reference

#endif  // FAIRMAS_REFERENCE_H_
