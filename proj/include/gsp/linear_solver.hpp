#pragma once

#include "gsp/groundstate_space.hpp"
#include "gsp/spectral.hpp"

#include <optional>
#include <span>

namespace gsp {

/// (L - mu) u = f on the radial sector.
struct LinearProblem {
    const DiscreteOperator& op;
    const SpectrumSummary& spectrum;
    double mu;
    std::span<const double> f;
};

struct LinearSolution {
    GroundstateVector u;
    double f1 = 0.0;
    double expected_c1 = 0.0;     // f1 / (Lambda - mu)
    double component_error = 0.0; // |u1 - f1/(Lambda - mu)| relative
};

/// Tridiagonal solve with residual check and the component identity
/// u1 = f1 / (Lambda - mu) verified to 1e-6. Throws SingularResolvent or
/// VerificationFailed.
LinearSolution solve_linear(const LinearProblem& p);

struct LinearCertificate {
    GroundstateVector solution;
    double f1 = 0.0;
    double f_perp_x = 0.0;
    double delta1 = 0.0; // f1 / (c0 ||f_perp||_X), +inf when f_perp = 0
    double window = 0.0; // min(delta0, delta1)
    bool in_window = false;
    RatioRange ratio;     // min/max of u/phi over the nodes
    double bound = 0.0;   // f1/(Lambda-mu) -/+ c0 ||f_perp||_X on the relevant side
    std::optional<double> gsp; // u >= gsp * phi, set only when checked on every node
    std::optional<double> gsn; // u <= gsn * phi, set only when checked on every node
    bool check_failed = false; // in the window but the pointwise check did not hold

    bool certified() const noexcept { return gsp.has_value() || gsn.has_value(); }
};

/// Groundstate positivity (mu < Lambda) or negativity (mu > Lambda) with the
/// explicit constants, verified pointwise. Outside the window only the raw
/// solution and its ratio range are reported.
/// Throws HypothesisViolated if f1 <= 0 or f is not finite in X.
LinearCertificate certify_theorem1(const LinearProblem& p, const WindowEstimate& w);

} // namespace gsp
