// Copyright 2026 The Tidy Authors.
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

#include "tidy/error.h"

namespace tidy {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kPlacementRejected: return "placement-rejected";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kCapacityExceeded: return "capacity-exceeded";
    case ErrorKind::kNumericError: return "numeric-error";
    case ErrorKind::kLayoutInfeasible: return "layout-infeasible";
    case ErrorKind::kIoError: return "io-error";
    case ErrorKind::kDanglingReference: return "dangling-reference";
    case ErrorKind::kCorruptCheckpoint: return "corrupt-checkpoint";
    case ErrorKind::kParseFailure: return "parse-failure";
    case ErrorKind::kLlmUnavailable: return "llm-unavailable";
    case ErrorKind::kLlmError: return "llm-error";
    case ErrorKind::kConfigError: return "config-error";
    case ErrorKind::kMissingAnchor: return "missing-anchor";
    case ErrorKind::kGroundingInfeasible: return "grounding-infeasible";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace tidy
