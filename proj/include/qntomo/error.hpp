// Copyright 2026 The qntomo Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qntomo {

enum class ErrorCode {
    InvalidTopology,
    NoPredecessor,
    InvalidParameter,
    UnsupportedModel,
    InvalidGate,
    InvalidCircuit,
    Capacity,
    NotDiagonal,
    LabelMismatch,
    WrongScheme,
    UninformativePair,
    InconsistentStatistics,
    SingularParameter,
    EstimationFailed,
    UnsupportedSupport,
    Config,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidTopology: return "invalid-topology";
        case ErrorCode::NoPredecessor: return "no-predecessor";
        case ErrorCode::InvalidParameter: return "invalid-parameter";
        case ErrorCode::UnsupportedModel: return "unsupported-model";
        case ErrorCode::InvalidGate: return "invalid-gate";
        case ErrorCode::InvalidCircuit: return "invalid-circuit";
        case ErrorCode::Capacity: return "capacity";
        case ErrorCode::NotDiagonal: return "not-diagonal";
        case ErrorCode::LabelMismatch: return "label-mismatch";
        case ErrorCode::WrongScheme: return "wrong-scheme";
        case ErrorCode::UninformativePair: return "uninformative-pair";
        case ErrorCode::InconsistentStatistics: return "inconsistent-statistics";
        case ErrorCode::SingularParameter: return "singular-parameter";
        case ErrorCode::EstimationFailed: return "estimation-failed";
        case ErrorCode::UnsupportedSupport: return "unsupported-support";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

/// Single exception type for the library; `code()` distinguishes failure kinds.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// True for the estimator failure family (maps to CLI exit code 2).
    [[nodiscard]] bool is_estimation_failure() const noexcept {
        switch (code_) {
            case ErrorCode::UninformativePair:
            case ErrorCode::InconsistentStatistics:
            case ErrorCode::SingularParameter:
            case ErrorCode::EstimationFailed:
                return true;
            default:
                return false;
        }
    }

  private:
    ErrorCode code_;
};

} // namespace qntomo
