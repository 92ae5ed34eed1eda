// Copyright 2026 The TraceGrid Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracegrid {

enum class ErrorKind {
  kMalformedPayload,
  kOutOfBinSpan,
  kMisalignedPlan,
  kOverlappingSnapshots,
  kEmptyWindow,
  kSchemaViolation,
  kOutOfOrderAppend,
  kStorageFailure,
  kInvalidSpec,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure surfaced by the library carries one of the kinds above so
// the HTTP layer can map it to a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace tracegrid
