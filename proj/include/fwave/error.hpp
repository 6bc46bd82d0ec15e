#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fwave {

enum class ErrorCode {
    MalformedHeader,
    MalformedSample,
    NonFiniteSample,
    EmptyRecord,
    IoFailure,
    MalformedLabels,
    UnknownOutcomeToken,
    DuplicateRecordId,
    InvalidConfig,
    SignalTooShort,
    NoBeatsDetected,
    TooFewBeats,
    EmptySignal,
    ShapeMismatch,
    ZeroEnergy,
    ZeroMean,
    TooFewValues,
    EmptyGroup,
    InvalidCounts,
    UnlabeledRecord,
    SingleClassCohort,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every library failure is reported through this type. what() always starts
/// with the error name so callers and CLI diagnostics can match on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Same error with "<stage>: " prefixed to the detail.
    Error in_stage(std::string_view stage) const;

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace fwave
