// Copyright 2026 The fair-screen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairscreen/errors.hpp"

namespace fairscreen {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSizeLimit: return "SizeLimit";
    case ErrorCode::kInvalidEps: return "InvalidEps";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kDegenerateInterval: return "DegenerateInterval";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIncompatibleFlags: return "IncompatibleFlags";
    case ErrorCode::kUnknownExample: return "UnknownExample";
  }
  return "Unknown";
}

}  // namespace fairscreen
