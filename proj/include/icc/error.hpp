#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icc {

enum class ErrorCode {
    InvalidArgument,
    MalformedManifest,
    DimensionMismatch,
    NonFiniteVector,
    ZeroVector,
    UnknownId,
    UnknownLabel,
    EmptyCandidates,
    EmptySupport,
    NotEnoughSupport,
    TemplateMissingPlaceholder,
    EmptyGeneration,
    EmptyTokenList,
    NonFiniteLogProb,
    PositiveLogProb,
    CandidateMissingFromResponse,
    ClassSetMismatch,
    BackendUnavailable,
    BackendError,
    ProtocolViolation,
    ConfigInvalid,
    DisjointnessViolation,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Errors thrown by every module carry a code so callers (and the CLI exit
// status) can branch on the failure class without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

} // namespace icc
