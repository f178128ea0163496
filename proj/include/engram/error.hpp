// Copyright 2026 The Engram Authors
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

namespace engram {

// Every failure the engine reports carries one of these codes. The HTTP layer
// maps them onto {code, message} bodies and status classes.
enum class ErrorCode {
  kInvalidArgument,
  kEmptyText,
  kDimensionMismatch,
  kZeroVector,
  kEmptyHistory,
  kClockSkew,
  kEmptyUtterance,
  kSpaceUnknown,
  kUnknownUnit,
  kUnknownNode,
  kCorruptSnapshot,
  kVersionUnsupported,
  kStaleVerdicts,
  kNotSoftDeleted,
  kDuplicateAgent,
  kUnknownAgent,
  kNoAgents,
  kEmptySelection,
  kPermissionDenied,
  kExpired,
  kConfigInvalid,
  kBindFailure,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace engram
