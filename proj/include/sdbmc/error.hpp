// Copyright 2026 The sdbmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
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

namespace sdbmc {

enum class ErrorCode {
    MissingFrame,
    DimensionMismatch,
    UnreadableFile,
    InvalidLabel,
    WindowTooLarge,
    WrongChannelCount,
    TooSmallForPyramid,
    ShapeMismatch,
    OddDimensions,
    WeightsMissing,
    AllPixelsMissing,
    EmptyCategory,
    IoFailure,
    Precondition,
    InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Every library failure is reported through this exception; `code()` lets
/// callers (the CLI in particular) map failures onto stable exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFrame: return "MissingFrame";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnreadableFile: return "UnreadableFile";
        case ErrorCode::InvalidLabel: return "InvalidLabel";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::WrongChannelCount: return "WrongChannelCount";
        case ErrorCode::TooSmallForPyramid: return "TooSmallForPyramid";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::OddDimensions: return "OddDimensions";
        case ErrorCode::WeightsMissing: return "WeightsMissing";
        case ErrorCode::AllPixelsMissing: return "AllPixelsMissing";
        case ErrorCode::EmptyCategory: return "EmptyCategory";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::Precondition: return "Precondition";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace sdbmc
