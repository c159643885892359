// Copyright 2026 The fockqubit Authors
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

namespace fockqubit {

enum class ErrorCode {
    invalid_dimension,
    truncation_overflow,
    dimension_mismatch,
    invalid_mode,
    invalid_parameter,
    undefined_state,
    no_herald,
    domain,
    invalid_state,
    rejected_input,
    internal,
    io,
    dependency,
    structural_diff,
    config,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_dimension: return "invalid-dimension";
        case ErrorCode::truncation_overflow: return "truncation-overflow";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::invalid_mode: return "invalid-mode";
        case ErrorCode::invalid_parameter: return "invalid-parameter";
        case ErrorCode::undefined_state: return "undefined-state";
        case ErrorCode::no_herald: return "no-herald";
        case ErrorCode::domain: return "domain";
        case ErrorCode::invalid_state: return "invalid-state";
        case ErrorCode::rejected_input: return "rejected-input";
        case ErrorCode::internal: return "internal";
        case ErrorCode::io: return "io";
        case ErrorCode::dependency: return "dependency";
        case ErrorCode::structural_diff: return "structural-diff";
        case ErrorCode::config: return "config";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

}  // namespace fockqubit
