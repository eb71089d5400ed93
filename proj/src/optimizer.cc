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

#include "fairmas/optimizer.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "fairmas/error.h"
#include "fairmas/rng.h"
#include "fairmas/run_engine.h"

namespace fairmas {
namespace {

int ResolveThreads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

void CheckConfig(const ConfigSpace& space, std::span<const double> config) {
  if (config.size() != space.params.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("config has {} values for {} parameters",
                            config.size(), space.params.size()));
  }
  for (std::size_t i = 0; i < config.size(); ++i) {
    const ParamDef& p = space.params[i];
    const double v = config[i];
    const bool integral = v == std::floor(v);
    const bool ok = std::isfinite(v) && v >= p.lo && v <= p.hi &&
                    (p.kind == ParamKind::kReal || integral);
    if (!ok) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("value {} is not valid for parameter '{}'", v,
                              p.name));
    }
  }
}

// Parallel evaluation; the first failure (by index) is rethrown.
std::vector<double> EvaluateBatch(const ConfigSpace& space,
                                  const Objective& objective,
                                  const std::vector<Config>& configs,
                                  int threads) {
  std::vector<double> values(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto count = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(ResolveThreads(threads))
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      values[i] = EvaluateConfig(space, objective, configs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return values;
}

OptimizationResult NewResult(const ConfigSpace& space, std::string algorithm,
                             std::uint64_t seed) {
  OptimizationResult result;
  result.algorithm = std::move(algorithm);
  for (const ParamDef& p : space.params) result.param_names.push_back(p.name);
  result.seed = seed;
  result.best_value = std::numeric_limits<double>::infinity();
  return result;
}

void Record(OptimizationResult& result, const std::vector<Config>& configs,
            const std::vector<double>& values) {
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const int index = static_cast<int>(result.trace.size());
    result.trace.push_back({index, configs[i], values[i]});
    if (values[i] < result.best_value || result.trace.size() == 1) {
      result.best_value = values[i];
      result.best_config = configs[i];
    }
  }
  result.budget_used = static_cast<int>(result.trace.size());
}

Config SampleUniform(const ConfigSpace& space, CounterStream& stream) {
  Config config;
  for (const ParamDef& p : space.params) {
    switch (p.kind) {
      case ParamKind::kBoolean:
        config.push_back(static_cast<double>(stream.NextBelow(2)));
        break;
      case ParamKind::kInteger:
        config.push_back(p.lo + static_cast<double>(stream.NextBelow(
                                    static_cast<std::uint64_t>(p.hi - p.lo) + 1)));
        break;
      case ParamKind::kReal:
        config.push_back(p.lo + (p.hi - p.lo) * stream.NextUniform());
        break;
    }
  }
  return config;
}

Config Mutate(const ConfigSpace& space, const Config& parent, double scale,
              CounterStream& stream) {
  Config child = parent;
  for (std::size_t i = 0; i < space.params.size(); ++i) {
    const ParamDef& p = space.params[i];
    switch (p.kind) {
      case ParamKind::kBoolean:
        if (stream.NextUniform() < scale) child[i] = 1.0 - child[i];
        break;
      case ParamKind::kInteger:
        if (stream.NextUniform() < scale) {
          child[i] += stream.NextBelow(2) ? 1.0 : -1.0;
        }
        break;
      case ParamKind::kReal:
        child[i] += scale * (p.hi - p.lo) * stream.NextNormal();
        break;
    }
    child[i] = std::clamp(child[i], p.lo, p.hi);
  }
  return child;
}

std::vector<double> Axis(const ParamDef& p, int resolution) {
  std::vector<double> axis;
  switch (p.kind) {
    case ParamKind::kBoolean:
      axis = {0.0, 1.0};
      break;
    case ParamKind::kInteger:
      for (double v = p.lo; v <= p.hi; v += 1.0) axis.push_back(v);
      break;
    case ParamKind::kReal:
      if (resolution == 1 || p.lo == p.hi) {
        axis = {p.lo};
      } else {
        for (int i = 0; i < resolution; ++i) {
          axis.push_back(i == resolution - 1
                             ? p.hi
                             : p.lo + (p.hi - p.lo) * i / (resolution - 1));
        }
      }
      break;
  }
  return axis;
}

}  // namespace

std::string_view ParamKindName(ParamKind kind) {
  switch (kind) {
    case ParamKind::kBoolean:
      return "boolean";
    case ParamKind::kInteger:
      return "integer";
    case ParamKind::kReal:
      return "real";
  }
  return "unknown";
}

void CheckSpace(const ConfigSpace& space) {
  std::set<std::string> names;
  for (const ParamDef& p : space.params) {
    if (!names.insert(p.name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("duplicate parameter '{}'", p.name));
    }
    if (!(p.lo <= p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("parameter '{}' has an empty range", p.name));
    }
    if (p.kind == ParamKind::kBoolean && (p.lo != 0.0 || p.hi != 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("boolean parameter '{}' must span [0, 1]", p.name));
    }
    if (p.kind == ParamKind::kInteger &&
        (p.lo != std::floor(p.lo) || p.hi != std::floor(p.hi))) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("integer parameter '{}' needs integral bounds",
                              p.name));
    }
  }
  if (!space.binder) {
    throw Error(ErrorCode::kInvalidArgument, "configuration space has no binder");
  }
}

double EvaluateConfig(const ConfigSpace& space, const Objective& objective,
                      std::span<const double> config) {
  CheckConfig(space, config);
  SystemSpec spec;
  try {
    spec = space.binder(config);
    RequireValid(spec);
  } catch (const Error& e) {
    throw Error(ErrorCode::kBindFailed,
                fmt::format("binding configuration failed: {}", e.what()));
  }
  const FairnessReport report =
      EvaluateMetric(objective.metric, spec, objective.protected_attribute,
                     objective.legit, objective.settings);
  double value = objective.signed_measure ? report.measure
                                          : std::abs(report.measure);
  if (objective.efficiency_weight > 0.0) {
    const auto rewards = ExpectedRewardsExact(
        CompiledSystem(spec), objective.settings.horizon,
        objective.settings.execution);
    value -= objective.efficiency_weight *
             std::accumulate(rewards.begin(), rewards.end(), 0.0);
  }
  return value;
}

OptimizationResult GridSearch(const ConfigSpace& space,
                              const Objective& objective, int resolution,
                              std::uint64_t cap, int threads) {
  CheckSpace(space);
  if (resolution < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resolution must be at least 1");
  }
  std::vector<std::vector<double>> axes;
  std::uint64_t size = 1;
  for (const ParamDef& p : space.params) {
    axes.push_back(Axis(p, resolution));
    size *= axes.back().size();
    if (size > cap) {
      throw Error(ErrorCode::kGridTooLarge,
                  fmt::format("grid has more than {} points", cap));
    }
  }
  std::vector<Config> configs;
  configs.reserve(size);
  std::vector<std::size_t> digit(axes.size(), 0);
  for (std::uint64_t c = 0; c < size; ++c) {
    Config config;
    for (std::size_t i = 0; i < axes.size(); ++i) config.push_back(axes[i][digit[i]]);
    configs.push_back(std::move(config));
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++digit[i] < axes[i].size()) break;
      digit[i] = 0;
    }
  }
  OptimizationResult result = NewResult(space, "grid", 0);
  Record(result, configs, EvaluateBatch(space, objective, configs, threads));
  return result;
}

OptimizationResult RandomSearch(const ConfigSpace& space,
                                const Objective& objective, int budget,
                                std::uint64_t seed, int threads) {
  CheckSpace(space);
  if (budget < 1) {
    throw Error(ErrorCode::kInvalidArgument, "budget must be at least 1");
  }
  std::vector<Config> configs;
  for (int i = 0; i < budget; ++i) {
    CounterStream stream(seed, static_cast<std::uint64_t>(i));
    configs.push_back(SampleUniform(space, stream));
  }
  OptimizationResult result = NewResult(space, "random", seed);
  Record(result, configs, EvaluateBatch(space, objective, configs, threads));
  return result;
}

OptimizationResult EvolutionarySearch(const ConfigSpace& space,
                                      const Objective& objective,
                                      const EvolutionParams& params,
                                      int threads) {
  CheckSpace(space);
  if (params.population < 1 || params.offspring < 1 ||
      params.budget < params.population) {
    throw Error(ErrorCode::kInvalidArgument,
                "evolution needs population >= 1, offspring >= 1 and "
                "budget >= population");
  }
  if (!(params.mutation_scale >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mutation scale must be >= 0");
  }
  OptimizationResult result = NewResult(space, "evolutionary", params.seed);

  struct Member {
    double value;
    int index;
    Config config;
  };
  auto by_fitness = [](const Member& a, const Member& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  };

  std::uint64_t generation = 0;
  CounterStream init(params.seed, generation++);
  std::vector<Config> configs;
  for (int i = 0; i < params.population; ++i) {
    configs.push_back(SampleUniform(space, init));
  }
  auto values = EvaluateBatch(space, objective, configs, threads);
  std::vector<Member> population;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    population.push_back({values[i], static_cast<int>(result.trace.size() + i), configs[i]});
  }
  Record(result, configs, values);
  std::sort(population.begin(), population.end(), by_fitness);

  while (result.budget_used < params.budget) {
    const int count = std::min(params.offspring, params.budget - result.budget_used);
    CounterStream stream(params.seed, generation++);
    configs.clear();
    for (int j = 0; j < count; ++j) {
      const Member& parent = population[stream.NextBelow(population.size())];
      configs.push_back(Mutate(space, parent.config, params.mutation_scale, stream));
    }
    values = EvaluateBatch(space, objective, configs, threads);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      population.push_back(
          {values[i], static_cast<int>(result.trace.size() + i), configs[i]});
    }
    Record(result, configs, values);
    std::sort(population.begin(), population.end(), by_fitness);
    population.resize(static_cast<std::size_t>(params.population));
  }
  return result;
}

std::vector<std::string> TrafficParameterNames() {
  return {"dedicated_lane",  "corridor_length", "fast_route_gain",
          "human_gain",      "slow_route_gain", "ai_fast_prob",
          "human_fast_prob", "arrival_reward",  "step_cost"};
}

ConfigSpace TrafficFamily(const traffic::Params& base,
                          std::span<const std::string> exposed) {
  traffic::CheckParams(base);
  using Setter = void (*)(traffic::Params&, double);
  struct Known {
    ParamDef def;
    Setter set;
  };
  const std::vector<Known> known = {
      {{"dedicated_lane", ParamKind::kBoolean, 0, 1},
       [](traffic::Params& p, double v) { p.dedicated_lane = v != 0.0; }},
      {{"corridor_length", ParamKind::kInteger, 1, 4},
       [](traffic::Params& p, double v) { p.corridor_length = static_cast<int>(v); }},
      {{"fast_route_gain", ParamKind::kReal, 0.05, 1},
       [](traffic::Params& p, double v) { p.fast_route_gain = v; }},
      {{"human_gain", ParamKind::kReal, 0.05, 1},
       [](traffic::Params& p, double v) { p.human_gain = v; }},
      {{"slow_route_gain", ParamKind::kReal, 0.05, 1},
       [](traffic::Params& p, double v) { p.slow_route_gain = v; }},
      {{"ai_fast_prob", ParamKind::kReal, 0, 1},
       [](traffic::Params& p, double v) { p.ai_fast_prob = v; }},
      {{"human_fast_prob", ParamKind::kReal, 0, 1},
       [](traffic::Params& p, double v) { p.human_fast_prob = v; }},
      {{"arrival_reward", ParamKind::kReal, 0, 20},
       [](traffic::Params& p, double v) { p.arrival_reward = v; }},
      {{"step_cost", ParamKind::kReal, -2, 0},
       [](traffic::Params& p, double v) { p.step_cost = v; }},
  };
  ConfigSpace space;
  space.family = "traffic";
  std::vector<Setter> setters;
  for (const std::string& name : exposed) {
    auto it = std::find_if(known.begin(), known.end(),
                           [&](const Known& k) { return k.def.name == name; });
    if (it == known.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("traffic has no parameter '{}'", name));
    }
    space.params.push_back(it->def);
    setters.push_back(it->set);
  }
  space.binder = [base, setters](std::span<const double> config) {
    traffic::Params params = base;
    for (std::size_t i = 0; i < setters.size(); ++i) setters[i](params, config[i]);
    return traffic::Build(params);
  };
  CheckSpace(space);
  return space;
}

ConfigSpace StartStateFamily(const SystemSpec& spec) {
  RequireValid(spec);
  ConfigSpace space;
  space.family = "start_state";
  space.params.push_back(
      {"start", ParamKind::kInteger, 0, static_cast<double>(spec.num_states - 1)});
  space.binder = [spec](std::span<const double> config) {
    SystemSpec bound = spec;
    bound.start = static_cast<StateId>(config[0]);
    return bound;
  };
  return space;
}

}  // namespace fairmas
