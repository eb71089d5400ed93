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

#include "fairmas/error.h"

namespace fairmas {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOutOfRange:
      return "INDEX_OUT_OF_RANGE";
    case ErrorCode::kShapeMismatch:
      return "SHAPE_MISMATCH";
    case ErrorCode::kEnumerationCapExceeded:
      return "ENUMERATION_CAP_EXCEEDED";
    case ErrorCode::kLfOverlapsProtected:
      return "LF_OVERLAPS_PROTECTED";
    case ErrorCode::kNotProtected:
      return "NOT_PROTECTED";
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kParseError:
      return "PARSE_ERROR";
    case ErrorCode::kValidationFailed:
      return "VALIDATION_FAILED";
    case ErrorCode::kUnsupportedSchemaVersion:
      return "UNSUPPORTED_SCHEMA_VERSION";
    case ErrorCode::kUnknownAttribute:
      return "UNKNOWN_ATTRIBUTE";
    case ErrorCode::kBindFailed:
      return "BIND_FAILED";
    case ErrorCode::kGridTooLarge:
      return "GRID_TOO_LARGE";
    case ErrorCode::kIo:
      return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace fairmas
