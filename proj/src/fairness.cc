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

#include "fairmas/fairness.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fairmas/error.h"

namespace fairmas {
namespace {

void CheckProtected(const SystemSpec& spec, int attribute) {
  if (attribute < 0 || attribute >= spec.num_attributes()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("attribute index {} out of range", attribute));
  }
  if (!spec.is_protected(attribute)) {
    throw Error(ErrorCode::kNotProtected,
                fmt::format("attribute '{}' is not protected",
                            spec.attribute_names[attribute]));
  }
}

std::vector<int> NormalizeLegit(const SystemSpec& spec,
                                std::span<const int> legit) {
  std::vector<int> out(legit.begin(), legit.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int f : out) {
    if (f < 0 || f >= spec.num_attributes()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  fmt::format("legitimate factor index {} out of range", f));
    }
    if (spec.is_protected(f)) {
      throw Error(ErrorCode::kLfOverlapsProtected,
                  fmt::format("legitimate factor '{}' is a protected attribute",
                              spec.attribute_names[f]));
    }
  }
  return out;
}

void CheckSettings(const MetricSettings& settings) {
  if (settings.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  if (settings.method.kind == Method::Kind::kMonteCarlo &&
      settings.method.samples < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Monte Carlo needs at least 2 samples");
  }
  if (!(settings.tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be non-negative");
  }
}

FairnessReport NewReport(Metric metric, int attribute, std::vector<int> legit,
                         const MetricSettings& settings) {
  FairnessReport report;
  report.metric = metric;
  report.protected_attribute = attribute;
  report.legitimate_factors = std::move(legit);
  report.horizon = settings.horizon;
  report.method = settings.method;
  report.tolerance = settings.tolerance;
  return report;
}

// Fills measure, verdict and diagnostics once contributions are in place.
// `sample_se` is the standard error of the per-sample measure (MC only).
void Finish(FairnessReport& report, std::optional<double> sample_se) {
  double measure = 0.0;
  for (const Contribution& c : report.contributions) measure += c.value;
  report.measure = measure;
  report.mean_contribution =
      measure / static_cast<double>(
                    std::max<std::size_t>(1, report.contributions.size()));
  if (report.method.kind == Method::Kind::kExact) {
    report.satisfied = std::abs(measure) <= report.tolerance;
    return;
  }
  const double se = sample_se.value_or(0.0);
  report.std_error = se;
  report.ci_low = measure - kNormalQuantile975 * se;
  report.ci_high = measure + kNormalQuantile975 * se;
  // Interval contains zero, or the lower edge of |measure| is within tolerance.
  report.satisfied =
      std::abs(measure) - kNormalQuantile975 * se <= report.tolerance;
}

std::vector<double> AgentMeans(const RewardSamples& draws,
                               std::uint64_t seed, int horizon) {
  std::vector<double> means;
  std::vector<double> column(draws.samples);
  for (int x = 0; x < draws.num_agents; ++x) {
    for (std::uint64_t i = 0; i < draws.samples; ++i) column[i] = draws.at(i, x);
    means.push_back(Estimate(column, seed, horizon).mean);
  }
  return means;
}

FairnessReport PairwiseMeasure(Metric metric, const SystemSpec& spec,
                               int attribute, std::vector<int> legit,
                               const MetricSettings& settings) {
  CheckSettings(settings);
  const auto pairs = MatchedPairs(spec, attribute, legit);
  FairnessReport report =
      NewReport(metric, attribute, std::move(legit), settings);
  const CompiledSystem system(spec);
  if (pairs.empty()) {
    const bool exact = settings.method.kind == Method::Kind::kExact;
    Finish(report, exact ? std::nullopt : std::optional<double>(0.0));
    return report;
  }

  const int horizon = settings.horizon;
  if (settings.method.kind == Method::Kind::kExact) {
    const auto rewards =
        ExpectedRewardsExact(system, horizon, settings.execution);
    for (const auto& [x, y] : pairs) {
      report.contributions.push_back({x, y, rewards[x] - rewards[y]});
    }
    Finish(report, std::nullopt);
    return report;
  }

  const auto& method = settings.method;
  const RewardSamples draws = SampleRewards(system, horizon, method.samples,
                                            method.seed, settings.execution);
  const auto means = AgentMeans(draws, method.seed, horizon);
  for (const auto& [x, y] : pairs) {
    report.contributions.push_back({x, y, means[x] - means[y]});
  }
  std::vector<double> per_sample(draws.samples, 0.0);
  for (std::uint64_t i = 0; i < draws.samples; ++i) {
    for (const auto& [x, y] : pairs) {
      per_sample[i] += draws.at(i, x) - draws.at(i, y);
    }
  }
  Finish(report, Estimate(per_sample, method.seed, horizon).std_error);
  return report;
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kDemPar:
      return "DEM_PAR";
    case Metric::kCountFair:
      return "COUNT_FAIR";
    case Metric::kCondSp:
      return "COND_SP";
  }
  return "UNKNOWN";
}

std::vector<std::pair<int, int>> MatchedPairs(const SystemSpec& spec,
                                              int protected_attribute,
                                              std::span<const int> legit) {
  CheckProtected(spec, protected_attribute);
  const std::vector<int> factors = NormalizeLegit(spec, legit);
  std::vector<std::pair<int, int>> pairs;
  const int n = spec.num_agents();
  auto holds_all = [&](int agent) {
    return std::all_of(factors.begin(), factors.end(), [&](int f) {
      return spec.agents[agent].attributes[f] == 1;
    });
  };
  for (int x = 0; x < n; ++x) {
    if (!holds_all(x)) continue;
    for (int y = 0; y < n; ++y) {
      if (x == y || !holds_all(y)) continue;
      if (MatchesExcept(spec, x, y, protected_attribute)) pairs.emplace_back(x, y);
    }
  }
  return pairs;
}

SystemSpec CounterfactualSystem(const SystemSpec& spec,
                                int protected_attribute) {
  CheckProtected(spec, protected_attribute);
  SystemSpec flipped = spec;
  for (AgentSpec& agent : flipped.agents) {
    if (protected_attribute >= static_cast<int>(agent.attributes.size())) {
      throw Error(ErrorCode::kShapeMismatch,
                  "agent attribute vector shorter than the attribute set");
    }
    auto& bit = agent.attributes[protected_attribute];
    bit = bit == 0 ? 1 : 0;
  }
  return flipped;
}

FairnessReport DemPar(const SystemSpec& spec, int protected_attribute,
                      const MetricSettings& settings) {
  return PairwiseMeasure(Metric::kDemPar, spec, protected_attribute, {},
                         settings);
}

FairnessReport CondSp(const SystemSpec& spec, int protected_attribute,
                      std::span<const int> legit,
                      const MetricSettings& settings) {
  CheckProtected(spec, protected_attribute);
  return PairwiseMeasure(Metric::kCondSp, spec, protected_attribute,
                         NormalizeLegit(spec, legit), settings);
}

FairnessReport CountFair(const SystemSpec& spec, int protected_attribute,
                         const MetricSettings& settings) {
  CheckSettings(settings);
  const SystemSpec counterfactual =
      CounterfactualSystem(spec, protected_attribute);
  FairnessReport report =
      NewReport(Metric::kCountFair, protected_attribute, {}, settings);

  std::vector<int> holders;
  for (int x = 0; x < spec.num_agents(); ++x) {
    if (spec.agents[x].attributes[protected_attribute] == 1) holders.push_back(x);
  }
  const CompiledSystem factual_system(spec);
  const CompiledSystem counter_system(counterfactual);
  const bool exact = settings.method.kind == Method::Kind::kExact;
  if (holders.empty()) {
    Finish(report, exact ? std::nullopt : std::optional<double>(0.0));
    return report;
  }

  const int horizon = settings.horizon;
  if (exact) {
    const auto factual =
        ExpectedRewardsExact(factual_system, horizon, settings.execution);
    const auto counter =
        ExpectedRewardsExact(counter_system, horizon, settings.execution);
    for (int x : holders) report.contributions.push_back({x, x, factual[x] - counter[x]});
    Finish(report, std::nullopt);
    return report;
  }

  // Common random numbers: both worlds use the same seed.
  const auto& method = settings.method;
  const RewardSamples factual = SampleRewards(
      factual_system, horizon, method.samples, method.seed, settings.execution);
  const RewardSamples counter = SampleRewards(
      counter_system, horizon, method.samples, method.seed, settings.execution);
  const auto factual_means = AgentMeans(factual, method.seed, horizon);
  const auto counter_means = AgentMeans(counter, method.seed, horizon);
  for (int x : holders) {
    report.contributions.push_back({x, x, factual_means[x] - counter_means[x]});
  }
  std::vector<double> per_sample(method.samples, 0.0);
  for (std::uint64_t i = 0; i < method.samples; ++i) {
    for (int x : holders) per_sample[i] += factual.at(i, x) - counter.at(i, x);
  }
  Finish(report, Estimate(per_sample, method.seed, horizon).std_error);
  return report;
}

FairnessReport EvaluateMetric(Metric metric, const SystemSpec& spec,
                              int protected_attribute,
                              std::span<const int> legit,
                              const MetricSettings& settings) {
  if (metric != Metric::kCondSp && !legit.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "legitimate factors apply only to conditional statistical "
                "parity");
  }
  switch (metric) {
    case Metric::kDemPar:
      return DemPar(spec, protected_attribute, settings);
    case Metric::kCountFair:
      return CountFair(spec, protected_attribute, settings);
    case Metric::kCondSp:
      return CondSp(spec, protected_attribute, legit, settings);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

}  // namespace fairmas
