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

#ifndef FAIRMAS_REPORT_H_
#define FAIRMAS_REPORT_H_

// Machine-readable report documents. Payload encodings are documented in
// docs/report_format.md.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairmas/core_model.h"
#include "fairmas/fairness.h"
#include "fairmas/optimizer.h"
#include "fairmas/run_engine.h"
#include "fairmas/scenario.h"
#include "json.hpp"

namespace fairmas {

inline constexpr std::string_view kToolVersion = "0.1.0";

nlohmann::json ToJson(const Violation& violation);
nlohmann::json ToJson(const std::vector<Violation>& violations);
nlohmann::json ToJson(const EstimatorResult& result);
nlohmann::json ToJson(const EnumerationSummary& summary);
nlohmann::json ToJson(const SystemSummary& summary);
// Attribute indices are written as names from `spec`.
nlohmann::json ToJson(const FairnessReport& report, const SystemSpec& spec);
nlohmann::json ToJson(const OptimizationResult& result);

struct ReportHeader {
  std::vector<std::string> command;
  std::string input_digest;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<double> wall_time_ms;  // omitted unless set
};

// Canonical report document text.
std::string RenderReport(const ReportHeader& header,
                         std::string_view payload_type,
                         const nlohmann::json& payload);

}  // namespace fairmas

#endif  // FAIRMAS_REPORT_H_
