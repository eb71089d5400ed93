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

#ifndef FAIRMAS_FAIRNESS_H_
#define FAIRMAS_FAIRNESS_H_

// Protected-attribute fairness measures over expected rewards.
//
//   DemPar(pr)     = sum over matched pairs (x, y) of R(x) - R(y)
//   CountFair(pr)  = sum over agents x holding pr of R(x, S) - R(x, S')
//   CondSP(pr, LF) = DemPar restricted to pairs where both hold every LF
//
// A matched pair (x, y) has x holding pr, y not, and both agreeing on every
// other attribute. S' flips pr for every agent and keeps everything else.
// Measures are signed sums; zero when the corresponding parity holds.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fairmas/core_model.h"
#include "fairmas/run_engine.h"

namespace fairmas {

enum class Metric { kDemPar, kCountFair, kCondSp };

std::string_view MetricName(Metric metric);  // "DEM_PAR", ...

struct Method {
  enum class Kind { kExact, kMonteCarlo };

  Kind kind = Kind::kExact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static Method Exact() { return {}; }
  static Method MonteCarlo(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::kMonteCarlo, samples, seed};
  }
  bool operator==(const Method&) const = default;
};

inline constexpr double kDefaultFairnessTolerance = 1e-9;

struct MetricSettings {
  int horizon = 1;
  Method method;
  double tolerance = kDefaultFairnessTolerance;
  ExecutionOptions execution;
};

// For CountFair entries, y == x and names the same agent in S'.
struct Contribution {
  int x = 0;
  int y = 0;
  double value = 0.0;

  bool operator==(const Contribution&) const = default;
};

struct FairnessReport {
  Metric metric = Metric::kDemPar;
  int protected_attribute = 0;
  std::vector<int> legitimate_factors;
  int horizon = 0;
  Method method;
  double measure = 0.0;  // in-order sum of contributions
  std::vector<Contribution> contributions;
  bool satisfied = true;
  double tolerance = kDefaultFairnessTolerance;
  double mean_contribution = 0.0;
  // Monte Carlo only: spread of the per-sample measure.
  std::optional<double> std_error;
  std::optional<double> ci_low;
  std::optional<double> ci_high;

  bool operator==(const FairnessReport&) const = default;
};

// Ordered pairs (x, y), ascending, that enter DemPar (empty `legit`) or
// CondSP. Throws kLfOverlapsProtected, kNotProtected, kIndexOutOfRange.
std::vector<std::pair<int, int>> MatchedPairs(const SystemSpec& spec,
                                              int protected_attribute,
                                              std::span<const int> legit = {});

// Flips `protected_attribute` for every agent. An involution.
SystemSpec CounterfactualSystem(const SystemSpec& spec,
                                int protected_attribute);

FairnessReport DemPar(const SystemSpec& spec, int protected_attribute,
                      const MetricSettings& settings);
FairnessReport CountFair(const SystemSpec& spec, int protected_attribute,
                         const MetricSettings& settings);
FairnessReport CondSp(const SystemSpec& spec, int protected_attribute,
                      std::span<const int> legit,
                      const MetricSettings& settings);

// Dispatches on `metric`; `legit` must be empty unless metric is kCondSp.
FairnessReport EvaluateMetric(Metric metric, const SystemSpec& spec,
                              int protected_attribute,
                              std::span<const int> legit,
                              const MetricSettings& settings);

}  // namespace fairmas

#endif  // FAIRMAS_FAIRNESS_H_
