// Copyright 2026 The qni Authors
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

namespace qni {

/// Failure categories raised by the library. Commands map these onto
/// process exit codes (see commands.hpp).
enum class Errc {
  QubitUnassigned,
  QubitMultiplyAssigned,
  EmptyPart,
  SizeMismatch,
  AssumptionViolated,
  DimensionMismatch,
  IncompleteKrausSet,
  ParameterOutOfRange,
  QubitIndexOutOfRange,
  NonPhysicalState,
  EmptyDistribution,
  BadPartition,
  BadArity,
  SettingsMismatch,
  InconsistentCorrelationStructure,
  FullyDepolarized,
  ConfigError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::QubitUnassigned: return "QubitUnassigned";
    case Errc::QubitMultiplyAssigned: return "QubitMultiplyAssigned";
    case Errc::EmptyPart: return "EmptyPart";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IncompleteKrausSet: return "IncompleteKrausSet";
    case Errc::ParameterOutOfRange: return "ParameterOutOfRange";
    case Errc::QubitIndexOutOfRange: return "QubitIndexOutOfRange";
    case Errc::NonPhysicalState: return "NonPhysicalState";
    case Errc::EmptyDistribution: return "EmptyDistribution";
    case Errc::BadPartition: return "BadPartition";
    case Errc::BadArity: return "BadArity";
    case Errc::SettingsMismatch: return "SettingsMismatch";
    case Errc::InconsistentCorrelationStructure: return "InconsistentCorrelationStructure";
    case Errc::FullyDepolarized: return "FullyDepolarized";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace qni
