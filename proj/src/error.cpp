#include "fwave/error.hpp"

namespace fwave {

std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::MalformedSample: return "MalformedSample";
        case ErrorCode::NonFiniteSample: return "NonFiniteSample";
        case ErrorCode::EmptyRecord: return "EmptyRecord";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::MalformedLabels: return "MalformedLabels";
        case ErrorCode::UnknownOutcomeToken: return "UnknownOutcomeToken";
        case ErrorCode::DuplicateRecordId: return "DuplicateRecordId";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::SignalTooShort: return "SignalTooShort";
        case ErrorCode::NoBeatsDetected: return "NoBeatsDetected";
        case ErrorCode::TooFewBeats: return "TooFewBeats";
        case ErrorCode::EmptySignal: return "EmptySignal";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ZeroEnergy: return "ZeroEnergy";
        case ErrorCode::ZeroMean: return "ZeroMean";
        case ErrorCode::TooFewValues: return "TooFewValues";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::InvalidCounts: return "InvalidCounts";
        case ErrorCode::UnlabeledRecord: return "UnlabeledRecord";
        case ErrorCode::SingleClassCohort: return "SingleClassCohort";
    }
    return "Unknown";
}

namespace {
std::string compose(ErrorCode code, const std::string& detail) {
    std::string msg(error_name(code));
    if (!detail.empty()) {
        msg += ": ";
        msg += detail;
    }
    return msg;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(detail) {}

Error Error::in_stage(std::string_view stage) const {
    return Error(code_, std::string(stage) + ": " + detail_);
}

}  // namespace fwave
