#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elastica {

enum class ErrorCode {
    SpeedViolation,
    DimensionMismatch,
    EmptyList,
    BadRange,
    NonpositiveScale,
    BadNormal,
    BadAxis,
    DensityDomainError,
    GridMismatch,
    NotClosed,
    ProbeFailed,
    NotWellPeriodic,
    NotFolded,
    HypothesisViolated,
    BadNormalization,
    ZeroChord,
    NoConvergence,
    LeftBasin,
    ModeNotFound,
    UnsupportedExponent,
    RootNotBracketed,
    ProjectionFailed,
    IllConditioned,
    RangeExceeded,
    NoDropFound,
    SchemaError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code) {}
    ErrorCode code() const { return m_code; }
private:
    ErrorCode m_code;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

} // namespace elastica
