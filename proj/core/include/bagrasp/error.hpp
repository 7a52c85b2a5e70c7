#pragma once

#include <stdexcept>
#include <string>

namespace bagrasp {

/// Failure categories. Each malformed-input or runtime failure maps to one
/// code so callers (and the CLI) can tell them apart without parsing text.
enum class ErrorCode {
    InvalidArgument,
    NotSkewSymmetric,
    LogNearAntipode,
    FileOpen,
    BadMagic,
    BadHeader,
    UnsupportedFormat,
    TruncatedPayload,
    ShapeMismatch,
    ImageTooSmall,
    BallNotFound,
    NoViableContour,
    DegeneratePolygon,
    OutOfOrderTimestamp,
    NoProposals,
    SingularJacobian,
    EmptyDataset,
    ConfigError,
    ParseError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bagrasp
