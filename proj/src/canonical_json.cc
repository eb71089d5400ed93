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

#include "fairmas/canonical_json.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace fairmas {
namespace {

using nlohmann::json;

bool IsScalar(const json& v) { return !v.is_array() && !v.is_object(); }

void WriteScalar(const json& v, std::string& out) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    out += std::isfinite(d) ? fmt::format("{:.17g}", d) : "null";
  } else {
    out += v.dump();
  }
}

void Write(const json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: sorted keys
      if (!first) out += ",\n";
      first = false;
      out += inner + json(it.key()).dump() + ": ";
      Write(it.value(), indent + 1, out);
    }
    out += "\n" + pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(v.begin(), v.end(), IsScalar)) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        WriteScalar(v[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += inner;
      Write(v[i], indent + 1, out);
    }
    out += "\n" + pad + "]";
  } else {
    WriteScalar(v, out);
  }
}

}  // namespace

std::string CanonicalDump(const json& value) {
  std::string out;
  Write(value, 0, out);
  out += "\n";
  return out;
}

std::string ContentDigest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

}  // namespace fairmas
