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

#include "fairmas/scenario.h"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fairmas/canonical_json.h"
#include "fairmas/error.h"
#include "fairmas/run_engine.h"

namespace fairmas {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kParseError,
              fmt::format("at {}: {}", path.empty() ? "/" : path, message));
}

// Typed, path-tracking access to a parsed document.
class Reader {
 public:
  explicit Reader(const LoadOptions& options) : options_(options) {}

  void CheckKeys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) Fail(path, "expected an object");
    if (options_.lenient) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) ==
          allowed.end()) {
        Fail(path, fmt::format("unknown key '{}'", it.key()));
      }
    }
  }

  static const json& Field(const json& obj, const std::string& path,
                           const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) Fail(path, fmt::format("missing key '{}'", key));
    return *it;
  }

  static const json& Array(const json& v, const std::string& path) {
    if (!v.is_array()) Fail(path, "expected an array");
    return v;
  }

  static std::int64_t Int(const json& v, const std::string& path,
                          std::int64_t lo = 0,
                          std::int64_t hi = std::numeric_limits<std::int32_t>::max()) {
    if (!v.is_number_integer()) Fail(path, "expected an integer");
    const auto i = v.get<std::int64_t>();
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      Fail(path, "integer out of range");
    }
    if (i < lo || i > hi) Fail(path, "integer out of range");
    return i;
  }

  static double Number(const json& v, const std::string& path) {
    if (!v.is_number()) Fail(path, "expected a number");
    return v.get<double>();
  }

  static std::string String(const json& v, const std::string& path) {
    if (!v.is_string()) Fail(path, "expected a string");
    return v.get<std::string>();
  }

  static std::vector<std::string> Strings(const json& v,
                                          const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < Array(v, path).size(); ++i) {
      out.push_back(String(v[i], fmt::format("{}/{}", path, i)));
    }
    return out;
  }

 private:
  LoadOptions options_;
};

std::size_t IndexOf(const std::vector<std::string>& names,
                    const std::string& name, const std::string& path,
                    const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) Fail(path, fmt::format("unknown {} '{}'", what, name));
  return static_cast<std::size_t>(it - names.begin());
}

void RequireUniqueNames(const std::vector<std::string>& names,
                        const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names[i] == names[j]) {
        Fail(path, fmt::format("duplicate name '{}'", names[i]));
      }
    }
  }
}

AgentSpec ReadAgent(const Reader& r, const json& doc, const std::string& path,
                    const SystemSpec& spec) {
  r.CheckKeys(doc, path, {"attributes", "actions", "policy", "rewards"});
  AgentSpec agent;

  const std::string attr_path = path + "/attributes";
  const json& bits = Reader::Array(Reader::Field(doc, path, "attributes"), attr_path);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    agent.attributes.push_back(static_cast<std::uint8_t>(
        Reader::Int(bits[i], fmt::format("{}/{}", attr_path, i), 0, 255)));
  }

  const std::string act_path = path + "/actions";
  const auto action_names = Reader::Strings(Reader::Field(doc, path, "actions"), act_path);
  for (std::size_t i = 0; i < action_names.size(); ++i) {
    agent.actions.push_back(static_cast<ActionId>(
        IndexOf(spec.action_names, action_names[i],
                fmt::format("{}/{}", act_path, i), "action")));
  }

  const std::string pol_path = path + "/policy";
  const json& rows = Reader::Array(Reader::Field(doc, path, "policy"), pol_path);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const std::string row_path = fmt::format("{}/{}", pol_path, s);
    if (!rows[s].is_object()) Fail(row_path, "expected an object");
    std::vector<double> row(spec.action_names.size(), 0.0);
    for (auto it = rows[s].begin(); it != rows[s].end(); ++it) {
      const std::string p = row_path + "/" + it.key();
      row[IndexOf(spec.action_names, it.key(), p, "action")] =
          Reader::Number(it.value(), p);
    }
    agent.policy.push_back(std::move(row));
  }

  if (doc.contains("rewards")) {
    const std::string rew_path = path + "/rewards";
    const json& triples = Reader::Array(doc["rewards"], rew_path);
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const std::string p = fmt::format("{}/{}", rew_path, i);
      const json& t = Reader::Array(triples[i], p);
      if (t.size() != 3) Fail(p, "expected [from, to, value]");
      const auto from = static_cast<StateId>(
          Reader::Int(t[0], p + "/0", 0, std::numeric_limits<std::uint32_t>::max()));
      const auto to = static_cast<StateId>(
          Reader::Int(t[1], p + "/1", 0, std::numeric_limits<std::uint32_t>::max()));
      const double value = Reader::Number(t[2], p + "/2");
      if (agent.rewards.contains({from, to})) {
        Fail(p, fmt::format("duplicate reward for ({}, {})", from, to));
      }
      if (value != 0.0) agent.rewards[{from, to}] = value;
    }
  }
  return agent;
}

TransitionEntry ReadEntry(const Reader& r, const json& doc,
                          const std::string& path, const SystemSpec& spec) {
  r.CheckKeys(doc, path, {"state", "joint", "next", "when"});
  TransitionEntry entry;
  entry.state = static_cast<StateId>(
      Reader::Int(Reader::Field(doc, path, "state"), path + "/state", 0,
                  std::numeric_limits<std::uint32_t>::max()));
  const auto joint = Reader::Strings(Reader::Field(doc, path, "joint"), path + "/joint");
  for (std::size_t i = 0; i < joint.size(); ++i) {
    entry.joint.push_back(static_cast<ActionId>(IndexOf(
        spec.action_names, joint[i], fmt::format("{}/joint/{}", path, i),
        "action")));
  }
  const json& next = Reader::Array(Reader::Field(doc, path, "next"), path + "/next");
  for (std::size_t i = 0; i < next.size(); ++i) {
    const std::string p = fmt::format("{}/next/{}", path, i);
    const json& pair = Reader::Array(next[i], p);
    if (pair.size() != 2) Fail(p, "expected [state, probability]");
    entry.next.push_back(
        {static_cast<StateId>(Reader::Int(pair[0], p + "/0", 0,
                                          std::numeric_limits<std::uint32_t>::max())),
         Reader::Number(pair[1], p + "/1")});
  }
  if (doc.contains("when")) {
    const json& when = Reader::Array(doc["when"], path + "/when");
    for (std::size_t i = 0; i < when.size(); ++i) {
      const std::string p = fmt::format("{}/when/{}", path, i);
      r.CheckKeys(when[i], p, {"agent", "attribute", "value"});
      ProfileLiteral lit;
      lit.agent = static_cast<int>(
          Reader::Int(Reader::Field(when[i], p, "agent"), p + "/agent"));
      lit.attribute = static_cast<int>(IndexOf(
          spec.attribute_names,
          Reader::String(Reader::Field(when[i], p, "attribute"), p + "/attribute"),
          p + "/attribute", "attribute"));
      lit.value = static_cast<std::uint8_t>(
          Reader::Int(Reader::Field(when[i], p, "value"), p + "/value", 0, 1));
      entry.condition.push_back(lit);
    }
  }
  return entry;
}

json ToDocument(const SystemSpec& spec) {
  json doc = json::object();
  doc["schema_version"] = std::string(kSchemaVersion);
  doc["num_states"] = spec.num_states;
  if (!spec.state_names.empty()) doc["state_names"] = spec.state_names;
  doc["start"] = spec.start;
  doc["actions"] = spec.action_names;
  doc["attributes"] = spec.attribute_names;
  json prot = json::array();
  for (int a : spec.protected_attributes) prot.push_back(spec.attribute_names.at(a));
  doc["protected"] = prot;

  json agents = json::array();
  for (const AgentSpec& agent : spec.agents) {
    json a = json::object();
    json bits = json::array();
    for (auto b : agent.attributes) bits.push_back(static_cast<int>(b));
    a["attributes"] = bits;
    json actions = json::array();
    for (ActionId id : agent.actions) actions.push_back(spec.action_names.at(id));
    a["actions"] = actions;
    json policy = json::array();
    for (const auto& row : agent.policy) {
      json r = json::object();
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] != 0.0) r[spec.action_names.at(k)] = row[k];
      }
      policy.push_back(r);
    }
    a["policy"] = policy;
    json rewards = json::array();
    for (const auto& [key, value] : agent.rewards) {
      if (value != 0.0) rewards.push_back(json::array({key.first, key.second, value}));
    }
    a["rewards"] = rewards;
    agents.push_back(a);
  }
  doc["agents"] = agents;

  json entries = json::array();
  for (const TransitionEntry& entry : spec.transition.entries) {
    json e = json::object();
    e["state"] = entry.state;
    json joint = json::array();
    for (ActionId id : entry.joint) joint.push_back(spec.action_names.at(id));
    e["joint"] = joint;
    json next = json::array();
    for (const Outcome& o : entry.next) next.push_back(json::array({o.next, o.prob}));
    e["next"] = next;
    if (!entry.condition.empty()) {
      json when = json::array();
      for (const ProfileLiteral& lit : entry.condition) {
        when.push_back({{"agent", lit.agent},
                        {"attribute", spec.attribute_names.at(lit.attribute)},
                        {"value", static_cast<int>(lit.value)}});
      }
      e["when"] = when;
    }
    entries.push_back(e);
  }
  doc["transitions"] = {{"attribute_sensitive", spec.transition.attribute_sensitive},
                        {"entries", entries}};
  return doc;
}

}  // namespace

SystemSpec LoadSystem(std::string_view document, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                fmt::format("at byte {}: {}", e.byte, e.what()));
  }
  const Reader r(options);
  if (!doc.is_object()) Fail("", "expected an object");
  const std::string version =
      Reader::String(Reader::Field(doc, "", "schema_version"), "/schema_version");
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::kUnsupportedSchemaVersion,
                fmt::format("schema_version '{}' is not supported (expected '{}')",
                            version, kSchemaVersion));
  }
  r.CheckKeys(doc, "",
              {"schema_version", "num_states", "state_names", "start", "actions",
               "attributes", "protected", "agents", "transitions"});

  SystemSpec spec;
  spec.num_states = static_cast<int>(
      Reader::Int(Reader::Field(doc, "", "num_states"), "/num_states"));
  if (doc.contains("state_names")) {
    spec.state_names = Reader::Strings(doc["state_names"], "/state_names");
  }
  spec.start = static_cast<StateId>(
      Reader::Int(Reader::Field(doc, "", "start"), "/start", 0,
                  std::numeric_limits<std::uint32_t>::max()));
  spec.action_names = Reader::Strings(Reader::Field(doc, "", "actions"), "/actions");
  RequireUniqueNames(spec.action_names, "/actions");
  spec.attribute_names =
      Reader::Strings(Reader::Field(doc, "", "attributes"), "/attributes");
  RequireUniqueNames(spec.attribute_names, "/attributes");
  const auto prot = Reader::Strings(Reader::Field(doc, "", "protected"), "/protected");
  RequireUniqueNames(prot, "/protected");
  for (std::size_t i = 0; i < prot.size(); ++i) {
    spec.protected_attributes.push_back(static_cast<int>(IndexOf(
        spec.attribute_names, prot[i], fmt::format("/protected/{}", i),
        "attribute")));
  }
  std::sort(spec.protected_attributes.begin(), spec.protected_attributes.end());

  const json& agents = Reader::Array(Reader::Field(doc, "", "agents"), "/agents");
  for (std::size_t x = 0; x < agents.size(); ++x) {
    spec.agents.push_back(ReadAgent(r, agents[x], fmt::format("/agents/{}", x), spec));
  }

  const json& transitions = Reader::Field(doc, "", "transitions");
  r.CheckKeys(transitions, "/transitions", {"attribute_sensitive", "entries"});
  if (transitions.contains("attribute_sensitive")) {
    if (!transitions["attribute_sensitive"].is_boolean()) {
      Fail("/transitions/attribute_sensitive", "expected a boolean");
    }
    spec.transition.attribute_sensitive =
        transitions["attribute_sensitive"].get<bool>();
  }
  const json& entries = Reader::Array(
      Reader::Field(transitions, "/transitions", "entries"), "/transitions/entries");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    spec.transition.entries.push_back(
        ReadEntry(r, entries[e], fmt::format("/transitions/entries/{}", e), spec));
  }

  RequireValid(spec);
  return spec;
}

SystemSpec LoadSystemFile(const std::filesystem::path& path,
                          const LoadOptions& options) {
  return LoadSystem(ReadTextFile(path), options);
}

std::string SaveSystem(const SystemSpec& spec) {
  return CanonicalDump(ToDocument(spec));
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot write '{}'", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw Error(ErrorCode::kIo,
                fmt::format("write to '{}' failed", path.string()));
  }
}

int FindAttribute(const SystemSpec& spec, std::string_view name) {
  auto it = std::find(spec.attribute_names.begin(), spec.attribute_names.end(),
                      name);
  if (it == spec.attribute_names.end()) {
    throw Error(ErrorCode::kUnknownAttribute,
                fmt::format("unknown attribute '{}'", name));
  }
  return static_cast<int>(it - spec.attribute_names.begin());
}

SystemSummary Describe(const SystemSpec& spec, int horizon) {
  const CompiledSystem system(spec);
  SystemSummary summary;
  summary.states = spec.num_states;
  summary.actions = spec.num_actions();
  summary.agents = spec.num_agents();
  summary.attributes = spec.num_attributes();
  for (int a : spec.protected_attributes) {
    summary.protected_names.push_back(spec.attribute_names[a]);
  }
  summary.attribute_sensitive = spec.transition.attribute_sensitive;
  summary.horizon = horizon;
  summary.branching = system.max_branching();
  const std::uint64_t bound = RunCountUpperBound(system, horizon);
  if (bound != std::numeric_limits<std::uint64_t>::max()) {
    summary.estimated_runs = bound;
  }
  return summary;
}

}  // namespace fairmas
