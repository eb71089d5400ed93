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

#include "fairmas/report.h"

#include "fairmas/canonical_json.h"

namespace fairmas {

using nlohmann::json;

json ToJson(const Violation& violation) {
  json j = {{"code", violation.code}, {"message", violation.message}};
  if (violation.agent) j["agent"] = *violation.agent;
  if (violation.state) j["state"] = *violation.state;
  if (violation.entry) j["entry"] = *violation.entry;
  return j;
}

json ToJson(const std::vector<Violation>& violations) {
  json list = json::array();
  for (const Violation& v : violations) list.push_back(ToJson(v));
  return list;
}

json ToJson(const EstimatorResult& result) {
  return {{"mean", result.mean},         {"std_error", result.std_error},
          {"ci_low", result.ci_low},     {"ci_high", result.ci_high},
          {"samples", result.samples},   {"seed", result.seed},
          {"horizon", result.horizon}};
}

json ToJson(const EnumerationSummary& summary) {
  return {{"runs", summary.runs},
          {"probability_mass", summary.probability_mass},
          {"expected_rewards", summary.expected_rewards}};
}

json ToJson(const SystemSummary& summary) {
  json j = {{"states", summary.states},
            {"actions", summary.actions},
            {"agents", summary.agents},
            {"attributes", summary.attributes},
            {"protected", summary.protected_names},
            {"attribute_sensitive", summary.attribute_sensitive},
            {"horizon", summary.horizon},
            {"branching", summary.branching}};
  if (summary.estimated_runs) {
    j["estimated_runs"] = *summary.estimated_runs;
  } else {
    j["estimated_runs"] = "OVERFLOW";
  }
  return j;
}

json ToJson(const FairnessReport& report, const SystemSpec& spec) {
  json j;
  j["metric"] = std::string(MetricName(report.metric));
  j["protected_attribute"] = spec.attribute_names.at(report.protected_attribute);
  json factors = json::array();
  for (int f : report.legitimate_factors) factors.push_back(spec.attribute_names.at(f));
  j["legitimate_factors"] = factors;
  j["horizon"] = report.horizon;
  if (report.method.kind == Method::Kind::kExact) {
    j["method"] = {{"kind", "EXACT"}};
  } else {
    j["method"] = {{"kind", "MC"},
                   {"samples", report.method.samples},
                   {"seed", report.method.seed}};
  }
  j["measure"] = report.measure;
  json items = json::array();
  for (const Contribution& c : report.contributions) {
    if (report.metric == Metric::kCountFair) {
      items.push_back({{"x", c.x}, {"contribution", c.value}});
    } else {
      items.push_back({{"x", c.x}, {"y", c.y}, {"contribution", c.value}});
    }
  }
  j[report.metric == Metric::kCountFair ? "agents" : "pairs"] = items;
  j["count"] = report.contributions.size();
  j["satisfied"] = report.satisfied;
  j["tolerance"] = report.tolerance;
  j["mean_contribution"] = report.mean_contribution;
  if (report.std_error) j["std_error"] = *report.std_error;
  if (report.ci_low) j["ci_low"] = *report.ci_low;
  if (report.ci_high) j["ci_high"] = *report.ci_high;
  return j;
}

json ToJson(const OptimizationResult& result) {
  auto named = [&](const Config& config) {
    json obj = json::object();
    for (std::size_t i = 0; i < config.size(); ++i) {
      obj[result.param_names.at(i)] = config[i];
    }
    return obj;
  };
  json trace = json::array();
  for (const TraceEntry& t : result.trace) {
    trace.push_back({{"index", t.index}, {"config", t.config}, {"value", t.value}});
  }
  return {{"algorithm", result.algorithm},
          {"parameters", result.param_names},
          {"best_config", named(result.best_config)},
          {"best_value", result.best_value},
          {"budget_used", result.budget_used},
          {"seed", result.seed},
          {"trace", trace}};
}

std::string RenderReport(const ReportHeader& header,
                         std::string_view payload_type, const json& payload) {
  json doc = {{"tool_version", std::string(kToolVersion)},
              {"command", header.command},
              {"input_digest", header.input_digest},
              {"parameters", header.parameters},
              {"payload_type", std::string(payload_type)},
              {"payload", payload}};
  if (header.wall_time_ms) doc["wall_time_ms"] = *header.wall_time_ms;
  return CanonicalDump(doc);
}

}  // namespace fairmas
