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

#ifndef FAIRMAS_OPTIMIZER_H_
#define FAIRMAS_OPTIMIZER_H_

// Black-box search over environment configurations for the fairest system.
//
// A configuration is a vector of doubles, one per parameter; booleans are
// 0/1 and integers are integral values. Every search is a pure function of
// (space, objective, hyperparameters, seed): candidate configurations are
// drawn serially, evaluated in parallel, and recorded in evaluation order.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmas/core_model.h"
#include "fairmas/fairness.h"
#include "fairmas/scenario.h"

namespace fairmas {

enum class ParamKind { kBoolean, kInteger, kReal };

std::string_view ParamKindName(ParamKind kind);

struct ParamDef {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  double lo = 0.0;
  double hi = 1.0;
};

using Config = std::vector<double>;
using Binder = std::function<SystemSpec(std::span<const double>)>;

struct ConfigSpace {
  std::string family;
  std::vector<ParamDef> params;
  Binder binder;
};

// Throws kInvalidArgument on duplicate names or degenerate ranges.
void CheckSpace(const ConfigSpace& space);

struct Objective {
  Metric metric = Metric::kDemPar;
  int protected_attribute = 0;
  std::vector<int> legit;  // COND_SP only
  MetricSettings settings;
  // Subtracts weight * (sum of exact expected rewards over all agents).
  double efficiency_weight = 0.0;
  // Minimize the signed measure instead of its magnitude.
  bool signed_measure = false;
};

// Objective value of one configuration. Throws kInvalidArgument for
// out-of-range configs and kBindFailed when the bound system is invalid.
double EvaluateConfig(const ConfigSpace& space, const Objective& objective,
                      std::span<const double> config);

struct TraceEntry {
  int index = 0;
  Config config;
  double value = 0.0;

  bool operator==(const TraceEntry&) const = default;
};

struct OptimizationResult {
  std::string algorithm;
  std::vector<std::string> param_names;
  Config best_config;
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
  int budget_used = 0;
  std::uint64_t seed = 0;

  bool operator==(const OptimizationResult&) const = default;
};

inline constexpr std::uint64_t kDefaultGridCap = 100'000;

// Exhaustive: booleans {0, 1}, integers lo..hi, reals `resolution` evenly
// spaced points including both ends. Lexicographic order, first parameter
// most significant; ties keep the first minimizer.
OptimizationResult GridSearch(const ConfigSpace& space,
                              const Objective& objective, int resolution,
                              std::uint64_t cap = kDefaultGridCap,
                              int threads = 0);

OptimizationResult RandomSearch(const ConfigSpace& space,
                                const Objective& objective, int budget,
                                std::uint64_t seed, int threads = 0);

struct EvolutionParams {
  int budget = 300;
  int population = 10;  // mu
  int offspring = 20;   // lambda
  double mutation_scale = 0.1;
  std::uint64_t seed = 0;
};

// (mu + lambda) evolution strategy with elitist truncation selection.
OptimizationResult EvolutionarySearch(const ConfigSpace& space,
                                      const Objective& objective,
                                      const EvolutionParams& params,
                                      int threads = 0);

// Registered families.
std::vector<std::string> TrafficParameterNames();
ConfigSpace TrafficFamily(const traffic::Params& base,
                          std::span<const std::string> exposed);
// Single integer parameter "start" over every state of `spec`.
ConfigSpace StartStateFamily(const SystemSpec& spec);

}  // namespace fairmas

#endif  // FAIRMAS_OPTIMIZER_H_
