#pragma once

#include <stdexcept>
#include <string>

namespace zkfl {

enum class ErrorCode {
    InvalidDimension,
    DimensionMismatch,
    MissingDomainTag,
    NonFiniteValue,
    ConfigMismatch,
    OverflowRisk,
    ShapeError,
    EmptyRound,
    NotRegistered,
    StaleRound,
    RoundClosed,
    RoundFailedQuorum,
    RoundNotFinalized,
    UnknownRound,
    UnknownScenario,
    ConfigInvalid,
    ParseError,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace zkfl
