#include "icc/error.hpp"

namespace icc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteVector: return "NonFiniteVector";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NotEnoughSupport: return "NotEnoughSupport";
    case ErrorCode::TemplateMissingPlaceholder: return "TemplateMissingPlaceholder";
    case ErrorCode::EmptyGeneration: return "EmptyGeneration";
    case ErrorCode::EmptyTokenList: return "EmptyTokenList";
    case ErrorCode::NonFiniteLogProb: return "NonFiniteLogProb";
    case ErrorCode::PositiveLogProb: return "PositiveLogProb";
    case ErrorCode::CandidateMissingFromResponse: return "CandidateMissingFromResponse";
    case ErrorCode::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace icc
