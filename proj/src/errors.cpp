#include "gsp/errors.hpp"

namespace gsp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositivePotential: return "NonPositivePotential";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::UnboundedSearch: return "UnboundedSearch";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::SectorBudget: return "SectorBudget";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BracketEscape: return "BracketEscape";
    case ErrorKind::MonotonicityBroken: return "MonotonicityBroken";
    case ErrorKind::SignMixed: return "SignMixed";
    case ErrorKind::NotCooperative: return "NotCooperative";
    case ErrorKind::RectangleEscape: return "RectangleEscape";
    case ErrorKind::WindowViolation: return "WindowViolation";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace gsp
