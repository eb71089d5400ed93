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

#include "fairmas/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fairmas/canonical_json.h"
#include "fairmas/core_model.h"
#include "fairmas/error.h"
#include "fairmas/fairness.h"
#include "fairmas/optimizer.h"
#include "fairmas/report.h"
#include "fairmas/run_engine.h"
#include "fairmas/scenario.h"

namespace fairmas::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Common {
  int threads = 0;
  bool timing = false;
  bool lenient = false;
};

struct MetricFlags {
  std::string metric = "dempar";
  std::string protected_name;
  std::string legit;
  int horizon = 1;
  std::string method = "exact";
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  double tolerance = kDefaultFairnessTolerance;
};

struct TrafficFlags {
  traffic::Params params;
  std::string cars = traffic::FormatCars(traffic::Params{}.cars);

  traffic::Params Resolve() const {
    traffic::Params p = params;
    p.cars = traffic::ParseCars(cars);
    return p;
  }
};

struct SearchFlags {
  std::string algorithm = "grid";
  std::string params = "dedicated_lane";
  int resolution = 11;
  int budget = 0;  // 0: algorithm default
  int population = 10;
  int offspring = 20;
  double mutation_scale = 0.1;
  std::uint64_t search_seed = 0;
  double efficiency_weight = 0.0;
  bool signed_measure = false;
  std::string family;
  std::string path;
};

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    if (comma > pos) out.emplace_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

// Worker count and timing do not change results, so they stay out of the
// echoed command.
std::vector<std::string> EchoCommand(std::span<const std::string> args) {
  std::vector<std::string> echo;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--timing") continue;
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].starts_with("--threads=")) continue;
    echo.push_back(args[i]);
  }
  return echo;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kUnsupportedSchemaVersion:
      return kExitParse;
    case ErrorCode::kEnumerationCapExceeded:
      return kExitCapExceeded;
    default:
      return kExitInvalid;
  }
}

struct ResolvedMetric {
  Metric metric = Metric::kDemPar;
  int protected_attribute = 0;
  std::vector<int> legit;
  MetricSettings settings;
};

ResolvedMetric ResolveMetric(const MetricFlags& flags, const SystemSpec& spec,
                             const Common& common, std::uint64_t cap) {
  ResolvedMetric r;
  if (flags.metric == "dempar") {
    r.metric = Metric::kDemPar;
  } else if (flags.metric == "countfair") {
    r.metric = Metric::kCountFair;
  } else if (flags.metric == "condsp") {
    r.metric = Metric::kCondSp;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("unknown metric '{}'", flags.metric));
  }
  if (!flags.legit.empty() && r.metric != Metric::kCondSp) {
    throw Error(ErrorCode::kInvalidArgument,
                "--legit-factors is only valid with --metric condsp");
  }
  if (flags.protected_name.empty()) {
    r.protected_attribute = spec.protected_attributes.at(0);
  } else {
    r.protected_attribute = FindAttribute(spec, flags.protected_name);
  }
  for (const std::string& name : SplitList(flags.legit)) {
    r.legit.push_back(FindAttribute(spec, name));
  }
  if (flags.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "--horizon must be at least 1");
  }
  r.settings.horizon = flags.horizon;
  r.settings.tolerance = flags.tolerance;
  r.settings.execution = {common.threads, cap};
  if (flags.method == "exact") {
    if (flags.samples || flags.seed) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--samples and --seed are only valid with --method mc");
    }
    r.settings.method = Method::Exact();
  } else if (flags.method == "mc") {
    r.settings.method =
        Method::MonteCarlo(flags.samples.value_or(10000), flags.seed.value_or(0));
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("unknown method '{}'", flags.method));
  }
  return r;
}

json MetricParameters(const ResolvedMetric& r, const SystemSpec& spec) {
  json legit = json::array();
  for (int f : r.legit) legit.push_back(spec.attribute_names[f]);
  json p = {{"metric", std::string(MetricName(r.metric))},
            {"protected", spec.attribute_names[r.protected_attribute]},
            {"legit_factors", legit},
            {"horizon", r.settings.horizon},
            {"tolerance", r.settings.tolerance},
            {"enumeration_cap", r.settings.execution.enumeration_cap}};
  if (r.settings.method.kind == Method::Kind::kExact) {
    p["method"] = "exact";
  } else {
    p["method"] = "mc";
    p["samples"] = r.settings.method.samples;
    p["seed"] = r.settings.method.seed;
  }
  return p;
}

void AddTrafficOptions(CLI::App* cmd, TrafficFlags& t) {
  cmd->add_option("--corridor-length", t.params.corridor_length,
                  "Positions to travel")
      ->capture_default_str();
  cmd->add_option("--cars", t.cars, "Comma list of driver:speed, e.g. human:high,ai:low")
      ->capture_default_str();
  cmd->add_option("--fast-route-gain", t.params.fast_route_gain,
                  "Success probability of an AI-driven car on the fast route")
      ->capture_default_str();
  cmd->add_option("--human-gain", t.params.human_gain,
                  "Success probability of a human-driven car on the fast route")
      ->capture_default_str();
  cmd->add_option("--slow-route-gain", t.params.slow_route_gain,
                  "Success probability on the slow route")
      ->capture_default_str();
  cmd->add_flag("--dedicated-lane", t.params.dedicated_lane,
                "Reserve the fast route for human-driven cars");
  cmd->add_option("--arrival-reward", t.params.arrival_reward)->capture_default_str();
  cmd->add_option("--step-cost", t.params.step_cost)->capture_default_str();
  cmd->add_option("--ai-fast-prob", t.params.ai_fast_prob,
                  "Probability an AI-driven car picks the fast route")
      ->capture_default_str();
  cmd->add_option("--human-fast-prob", t.params.human_fast_prob,
                  "Probability a human-driven car picks the fast route")
      ->capture_default_str();
}

void AddMetricOptions(CLI::App* cmd, MetricFlags& m) {
  cmd->add_option("--metric", m.metric, "dempar | countfair | condsp")
      ->capture_default_str();
  cmd->add_option("--protected", m.protected_name,
                  "Protected attribute name (default: first protected)");
  cmd->add_option("--legit-factors", m.legit,
                  "Comma list of legitimate factors (condsp only)");
  cmd->add_option("--horizon", m.horizon, "Steps per run")->capture_default_str();
  cmd->add_option("--method", m.method, "exact | mc")->capture_default_str();
  cmd->add_option("--samples", m.samples, "Monte Carlo samples (mc only)");
  cmd->add_option("--seed", m.seed, "Monte Carlo seed (mc only)");
  cmd->add_option("--tolerance", m.tolerance, "Satisfaction tolerance")
      ->capture_default_str();
}

void AddCommonOptions(CLI::App* cmd, Common& c) {
  cmd->add_option("--threads", c.threads, "Worker threads (0: OpenMP default)");
  cmd->add_flag("--timing", c.timing, "Include wall_time_ms in the report");
}

class Session {
 public:
  Session(std::span<const std::string> args, std::ostream& out,
          std::ostream& err)
      : args_(args), out_(out), err_(err), started_(Clock::now()) {}

  ReportHeader Header(const std::string& digest, json parameters,
                      const Common& common) const {
    ReportHeader h;
    h.command = EchoCommand(args_);
    h.input_digest = digest;
    h.parameters = std::move(parameters);
    if (common.timing) {
      h.wall_time_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
    }
    return h;
  }

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

 private:
  std::span<const std::string> args_;
  std::ostream& out_;
  std::ostream& err_;
  Clock::time_point started_;
};

struct LoadedFile {
  SystemSpec spec;
  std::string digest;
};

LoadedFile Load(const std::string& path, const Common& common) {
  const std::string text = ReadTextFile(path);
  return {LoadSystem(text, {common.lenient}), ContentDigest(text)};
}

void Emit(Session& s, const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    s.out() << text;
  } else {
    WriteTextFile(out_path, text);
  }
}

int CmdValidate(Session& s, const std::string& path, const Common& common) {
  const std::string text = ReadTextFile(path);
  std::vector<Violation> violations;
  try {
    LoadSystem(text, {common.lenient});
  } catch (const ValidationError& e) {
    violations = e.violations();
  }
  json payload = {{"valid", violations.empty()},
                  {"violations", ToJson(violations)}};
  s.out() << RenderReport(s.Header(ContentDigest(text), json::object(), common),
                          "validation", payload);
  return violations.empty() ? kExitOk : kExitInvalid;
}

int CmdDescribe(Session& s, const std::string& path, int horizon,
                const Common& common) {
  const LoadedFile f = Load(path, common);
  s.out() << RenderReport(s.Header(f.digest, {{"horizon", horizon}}, common),
                          "system_summary", ToJson(Describe(f.spec, horizon)));
  return kExitOk;
}

int CmdEnumerate(Session& s, const std::string& path, int horizon,
                 const Common& common, std::uint64_t cap) {
  const LoadedFile f = Load(path, common);
  const EnumerationSummary summary =
      EnumerateExact(CompiledSystem(f.spec), horizon, {common.threads, cap});
  const bool normalized =
      std::abs(summary.probability_mass - 1.0) <= kNormalizationTolerance;
  json payload = ToJson(summary);
  payload["mass_within_tolerance"] = normalized;
  s.out() << RenderReport(
      s.Header(f.digest, {{"horizon", horizon}, {"enumeration_cap", cap}}, common),
      "enumeration_summary", payload);
  if (!normalized) {
    s.err() << fmt::format("error: probability mass {:.17g} is not 1\n",
                           summary.probability_mass);
    return kExitInvalid;
  }
  return kExitOk;
}

int CmdMetric(Session& s, const std::string& path, const MetricFlags& flags,
              const Common& common, std::uint64_t cap) {
  const LoadedFile f = Load(path, common);
  const ResolvedMetric r = ResolveMetric(flags, f.spec, common, cap);
  const FairnessReport report = EvaluateMetric(
      r.metric, f.spec, r.protected_attribute, r.legit, r.settings);
  s.out() << RenderReport(s.Header(f.digest, MetricParameters(r, f.spec), common),
                          "fairness_report", ToJson(report, f.spec));
  return report.satisfied ? kExitOk : kExitUnfair;
}

int CmdCounterfactual(Session& s, const std::string& path,
                      const std::string& name, const std::string& out_path,
                      const Common& common) {
  const LoadedFile f = Load(path, common);
  const int attribute =
      name.empty() ? f.spec.protected_attributes.at(0) : FindAttribute(f.spec, name);
  Emit(s, SaveSystem(CounterfactualSystem(f.spec, attribute)), out_path);
  return kExitOk;
}

int CmdGen(Session& s, const std::string& family, const TrafficFlags& t,
           const std::string& out_path) {
  if (family != "traffic") {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("unknown scenario family '{}'", family));
  }
  Emit(s, SaveSystem(traffic::Build(t.Resolve())), out_path);
  return kExitOk;
}

int CmdOptimize(Session& s, const SearchFlags& search, const MetricFlags& flags,
                const TrafficFlags& t, const Common& common, std::uint64_t cap) {
  if (search.path.empty() == search.family.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give exactly one of a scenario path or --family");
  }
  ConfigSpace space;
  SystemSpec reference;
  std::string digest;
  json parameters;
  if (!search.family.empty()) {
    if (search.family != "traffic") {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("unknown scenario family '{}'", search.family));
    }
    const traffic::Params base = t.Resolve();
    const auto exposed = SplitList(search.params);
    space = TrafficFamily(base, exposed);
    reference = traffic::Build(base);
    digest = ContentDigest(SaveSystem(reference));
  } else {
    const LoadedFile f = Load(search.path, common);
    reference = f.spec;
    digest = f.digest;
    space = StartStateFamily(reference);
  }

  const ResolvedMetric r = ResolveMetric(flags, reference, common, cap);
  Objective objective;
  objective.metric = r.metric;
  objective.protected_attribute = r.protected_attribute;
  objective.legit = r.legit;
  objective.settings = r.settings;
  objective.efficiency_weight = search.efficiency_weight;
  objective.signed_measure = search.signed_measure;
  if (!(objective.efficiency_weight >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "--lambda must be non-negative");
  }

  OptimizationResult result;
  parameters = MetricParameters(r, reference);
  parameters["family"] = space.family;
  parameters["search"] = search.algorithm;
  parameters["lambda"] = search.efficiency_weight;
  parameters["signed"] = search.signed_measure;
  if (search.algorithm == "grid") {
    parameters["resolution"] = search.resolution;
    result = GridSearch(space, objective, search.resolution, kDefaultGridCap,
                        common.threads);
  } else if (search.algorithm == "random") {
    const int budget = search.budget > 0 ? search.budget : 50;
    parameters["budget"] = budget;
    parameters["search_seed"] = search.search_seed;
    result = RandomSearch(space, objective, budget, search.search_seed,
                          common.threads);
  } else if (search.algorithm == "evolutionary") {
    EvolutionParams ep;
    ep.budget = search.budget > 0 ? search.budget : 300;
    ep.population = search.population;
    ep.offspring = search.offspring;
    ep.mutation_scale = search.mutation_scale;
    ep.seed = search.search_seed;
    parameters["budget"] = ep.budget;
    parameters["population"] = ep.population;
    parameters["offspring"] = ep.offspring;
    parameters["mutation_scale"] = ep.mutation_scale;
    parameters["search_seed"] = ep.seed;
    result = EvolutionarySearch(space, objective, ep, common.threads);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("unknown search '{}'", search.algorithm));
  }
  s.out() << RenderReport(s.Header(digest, parameters, common),
                          "optimization_result", ToJson(result));
  return kExitOk;
}

}  // namespace

std::uint64_t EnumerationCapFromEnvironment() {
  const char* value = std::getenv("FAIRMAS_ENUM_CAP");
  if (value == nullptr || *value == '\0') return kDefaultEnumerationCap;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(value, &end, 10);
  if (*end != '\0' || cap == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("FAIRMAS_ENUM_CAP='{}' is not a positive integer",
                            value));
  }
  return cap;
}

int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"fairmas: protected-attribute fairness for multi-agent systems",
               "fairmas"};
  app.require_subcommand(1);

  Common common;
  MetricFlags metric;
  TrafficFlags traffic_flags;
  SearchFlags search;
  std::string path;
  std::string out_path;
  std::string protected_name;
  std::string family = "traffic";
  int horizon = 1;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("path", path, "Scenario file")->required();
  validate->add_flag("--lenient", common.lenient, "Accept unknown keys");
  AddCommonOptions(validate, common);

  auto* describe = app.add_subcommand("describe", "Summarize a scenario");
  describe->add_option("path", path, "Scenario file")->required();
  describe->add_option("--horizon", horizon, "Horizon for the run estimate")
      ->capture_default_str();
  describe->add_flag("--lenient", common.lenient, "Accept unknown keys");
  AddCommonOptions(describe, common);

  auto* enumerate = app.add_subcommand(
      "enumerate", "Enumerate all runs: count, mass and exact expected rewards");
  enumerate->add_option("path", path, "Scenario file")->required();
  enumerate->add_option("--horizon", horizon, "Steps per run")->required();
  enumerate->add_flag("--lenient", common.lenient, "Accept unknown keys");
  AddCommonOptions(enumerate, common);

  auto* metric_cmd = app.add_subcommand("metric", "Evaluate a fairness metric");
  metric_cmd->add_option("path", path, "Scenario file")->required();
  AddMetricOptions(metric_cmd, metric);
  metric_cmd->add_flag("--lenient", common.lenient, "Accept unknown keys");
  AddCommonOptions(metric_cmd, common);

  auto* counterfactual = app.add_subcommand(
      "counterfactual", "Write the system with a protected attribute flipped");
  counterfactual->add_option("path", path, "Scenario file")->required();
  counterfactual->add_option("--protected", protected_name, "Attribute to flip");
  counterfactual->add_option("--out", out_path, "Output file (default: stdout)");
  counterfactual->add_flag("--lenient", common.lenient, "Accept unknown keys");

  auto* gen = app.add_subcommand("gen", "Generate a scenario from a family");
  gen->add_option("--family", family, "Scenario family")->capture_default_str();
  gen->add_option("--out", out_path, "Output file (default: stdout)");
  AddTrafficOptions(gen, traffic_flags);

  auto* optimize = app.add_subcommand(
      "optimize", "Search configurations minimizing a fairness objective");
  optimize->add_option("path", search.path,
                       "Scenario file (searches over the start state)");
  optimize->add_option("--family", search.family, "Scenario family, e.g. traffic");
  optimize->add_option("--params", search.params,
                       "Comma list of family parameters to search")
      ->capture_default_str();
  optimize->add_option("--search", search.algorithm, "grid | random | evolutionary")
      ->capture_default_str();
  optimize->add_option("--resolution", search.resolution, "Grid points per real")
      ->capture_default_str();
  optimize->add_option("--budget", search.budget, "Evaluations (random/evolutionary)");
  optimize->add_option("--population", search.population)->capture_default_str();
  optimize->add_option("--offspring", search.offspring)->capture_default_str();
  optimize->add_option("--mutation-scale", search.mutation_scale)
      ->capture_default_str();
  optimize->add_option("--search-seed", search.search_seed)->capture_default_str();
  optimize->add_option("--lambda", search.efficiency_weight,
                       "Weight of total expected reward subtracted from the objective")
      ->capture_default_str();
  optimize->add_flag("--signed", search.signed_measure,
                     "Minimize the signed measure instead of its magnitude");
  optimize->add_flag("--lenient", common.lenient, "Accept unknown keys");
  AddMetricOptions(optimize, metric);
  AddTrafficOptions(optimize, traffic_flags);
  AddCommonOptions(optimize, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalid;
  }

  Session session(args, out, err);
  try {
    const std::uint64_t cap = EnumerationCapFromEnvironment();
    if (validate->parsed()) return CmdValidate(session, path, common);
    if (describe->parsed()) return CmdDescribe(session, path, horizon, common);
    if (enumerate->parsed()) {
      return CmdEnumerate(session, path, horizon, common, cap);
    }
    if (metric_cmd->parsed()) return CmdMetric(session, path, metric, common, cap);
    if (counterfactual->parsed()) {
      return CmdCounterfactual(session, path, protected_name, out_path, common);
    }
    if (gen->parsed()) return CmdGen(session, family, traffic_flags, out_path);
    if (optimize->parsed()) {
      return CmdOptimize(session, search, metric, traffic_flags, common, cap);
    }
  } catch (const ValidationError& e) {
    err << "error: VALIDATION_FAILED: " << e.what() << "\n";
    for (const Violation& v : e.violations()) {
      err << "  " << v.code << ": " << v.message << "\n";
    }
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitCodeFor(e.code());
  }
  return kExitInvalid;
}

}  // namespace fairmas::cli
