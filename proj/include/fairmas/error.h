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

#ifndef FAIRMAS_ERROR_H_
#define FAIRMAS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairmas {

enum class ErrorCode {
  kIndexOutOfRange,
  kShapeMismatch,
  kEnumerationCapExceeded,
  kLfOverlapsProtected,
  kNotProtected,
  kInvalidArgument,
  kParseError,
  kValidationFailed,
  kUnsupportedSchemaVersion,
  kUnknownAttribute,
  kBindFailed,
  kGridTooLarge,
  kIo,
};

// Upper-case identifier used in reports and diagnostics, e.g.
// "ENUMERATION_CAP_EXCEEDED".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairmas

#endif  // FAIRMAS_ERROR_H_
