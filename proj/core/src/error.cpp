// Copyright 2026 The SCS Authors
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

#include "scs/error.hpp"

namespace scs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kIo:
      return "i/o error";
    case ErrorCode::kMalformedHeader:
      return "malformed header";
    case ErrorCode::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorCode::kDuplicateId:
      return "duplicate id";
    case ErrorCode::kNonFinite:
      return "non-finite value";
    case ErrorCode::kZeroNorm:
      return "zero norm";
    case ErrorCode::kUnknownId:
      return "unknown id";
    case ErrorCode::kEmptyInput:
      return "empty input";
    case ErrorCode::kShapeMismatch:
      return "shape mismatch";
    case ErrorCode::kOracle:
      return "oracle error";
    case ErrorCode::kTransport:
      return "transport error";
    case ErrorCode::kOutOfRange:
      return "out of range";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace scs
