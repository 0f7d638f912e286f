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

#ifndef SIF_ERROR_HPP_
#define SIF_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sif {

enum class ErrorKind {
  kEmptyEvent,
  kEmptySequence,
  kNoEventsFound,
  kInsufficientSeedEvents,
  kParseError,
  kDuplicateEsdId,
  kIndivisiblePartition,
  kInsufficientScenarios,
  kDegenerateLabels,
  kEndpointTimeout,
  kEndpointProtocolError,
  kEndpointWorkerError,
  kEndpointUnavailable,
  kEmptyInput,
  kEmptyReferences,
  kMissingReferences,
  kUnknownScenario,
  kAlignmentError,
  kLengthMismatch,
  kZeroVariance,
  kInvalidArgument,
  kIoError,
};

std::string_view error_kind_name(ErrorKind kind);

// All library failures are reported with this exception type. `ids()` carries
// the offending request ids for endpoint errors and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::string> ids = {})
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        ids_(std::move(ids)) {}

  ErrorKind kind() const { return kind_; }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> ids_;
};

}  // namespace sif

#endif  // SIF_ERROR_HPP_
