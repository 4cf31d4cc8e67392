#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsp {

enum class ErrorKind {
    InvalidArgument,
    NonPositivePotential,
    NotIncreasing,
    UnboundedSearch,
    ConvergenceFailure,
    SectorBudget,
    SingularResolvent,
    HypothesisViolated,
    NoConvergence,
    BracketEscape,
    MonotonicityBroken,
    SignMixed,
    NotCooperative,
    RectangleEscape,
    WindowViolation,
    VerificationFailed,
    MalformedInput,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace gsp
