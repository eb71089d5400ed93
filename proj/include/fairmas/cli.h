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

#ifndef FAIRMAS_CLI_H_
#define FAIRMAS_CLI_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

namespace fairmas::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,  // validation, flags, I/O
  kExitParse = 2,
  kExitUnfair = 3,
  kExitCapExceeded = 4,
};

// Runs one command; `args` excludes the program name. Reports go to `out`,
// diagnostics to `err`.
int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

// FAIRMAS_ENUM_CAP if set, else the library default.
std::uint64_t EnumerationCapFromEnvironment();

}  // namespace fairmas::cli

#endif  // FAIRMAS_CLI_H_
