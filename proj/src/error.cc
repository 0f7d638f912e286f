// Copyright 2026 The SIF Authors.
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

#include "sif/error.hpp"

namespace sif {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptyEvent: return "EmptyEvent";
    case ErrorKind::kEmptySequence: return "EmptySequence";
    case ErrorKind::kNoEventsFound: return "NoEventsFound";
    case ErrorKind::kInsufficientSeedEvents: return "InsufficientSeedEvents";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kDuplicateEsdId: return "DuplicateEsdId";
    case ErrorKind::kIndivisiblePartition: return "IndivisiblePartition";
    case ErrorKind::kInsufficientScenarios: return "InsufficientScenarios";
    case ErrorKind::kDegenerateLabels: return "DegenerateLabels";
    case ErrorKind::kEndpointTimeout: return "EndpointTimeout";
    case ErrorKind::kEndpointProtocolError: return "EndpointProtocolError";
    case ErrorKind::kEndpointWorkerError: return "EndpointWorkerError";
    case ErrorKind::kEndpointUnavailable: return "EndpointUnavailable";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kEmptyReferences: return "EmptyReferences";
    case ErrorKind::kMissingReferences: return "MissingReferences";
    case ErrorKind::kUnknownScenario: return "UnknownScenario";
    case ErrorKind::kAlignmentError: return "AlignmentError";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kZeroVariance: return "ZeroVariance";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sif
