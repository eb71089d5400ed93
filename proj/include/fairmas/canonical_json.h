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

#ifndef FAIRMAS_CANONICAL_JSON_H_
#define FAIRMAS_CANONICAL_JSON_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace fairmas {

// Deterministic text form: keys sorted, two-space indentation, arrays of
// scalars on one line, floating-point values with 17 significant digits,
// trailing newline. Equal values always produce identical bytes.
std::string CanonicalDump(const nlohmann::json& value);

// "fnv1a64:<16 hex digits>" over the raw bytes.
std::string ContentDigest(std::string_view bytes);

}  // namespace fairmas

#endif  // FAIRMAS_CANONICAL_JSON_H_
