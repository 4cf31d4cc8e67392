#pragma once

#include "gsp/groundstate_space.hpp"
#include "gsp/nonlinearity.hpp"
#include "gsp/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gsp {

/// Which side of Lambda: maximum principle (mu < Lambda) or anti-maximum
/// principle (mu > Lambda).
enum class Branch { MP, AMP };

const char* to_string(Branch b) noexcept;

/// Ordered pair of multiples of phi trapping the solution:
///   MP:  [kappa phi/(Lambda-mu), K phi/(Lambda-mu)]
///   AMP: [K phi/(Lambda-mu), kappa phi/(Lambda-mu)]
struct Bracket {
    std::vector<double> lower;
    std::vector<double> upper;
    Branch kind = Branch::MP;
    double lower_coef = 0.0; // lower = lower_coef * phi
    double upper_coef = 0.0;
};

Bracket make_bracket(const Nonlinearity& nl, std::span<const double> phi, double Lambda, double mu);

/// L u = mu u + f(x, u)
struct SemilinearProblem {
    const DiscreteOperator& op;
    const SpectrumSummary& spectrum;
    const WindowEstimate& window;
    const Nonlinearity& nl;
    double mu;
};

/// delta = min{delta0, kappa/(2 c0 K)}
double window_semilinear(const Nonlinearity& nl, const WindowEstimate& w);

/// w = (L - mu)^{-1} f(., u)
std::vector<double> apply_T(const DiscreteOperator& op, std::span<const double> phi, const Nonlinearity& nl,
                            double mu, std::span<const double> u);

enum class StartPoint { Lower, Upper, Custom };

struct SemilinearOptions {
    double damping = 0.5;
    int max_iter = 500;
    double tol_x = 1e-9;
    StartPoint start = StartPoint::Lower;
    std::vector<double> custom_start;
    double escape_fraction = 0.05; // BracketEscape past this share of nodes in one step
    bool two_start = true;         // also run from the opposite corner for the uniqueness gap
};

struct BrezisOswald {
    double lhs = 0.0;           // integral (-Delta u/u + Delta v/v)(u^2 - v^2)
    double gradient_form = 0.0; // integral |v grad(u/v)|^2 + |u grad(v/u)|^2
    double identity_gap = 0.0;  // |lhs - gradient_form|
};

/// Both sides of the Brezis-Oswald identity on the grid; u, v must be of one
/// common strict sign (absolute values are used). Throws SignMixed.
BrezisOswald brezis_oswald_check(const DiscreteOperator& op, std::span<const double> u,
                                 std::span<const double> v);

struct Uniqueness {
    bool computed = false;
    double two_start_gap = 0.0;          // X-distance between limits from the two corners
    double brezis_oswald_lhs = 0.0;      // T1
    double nonlinear_term = 0.0;         // T2 = integral (f(u)/u - f(v)/v)(u^2 - v^2)
    double brezis_oswald_residual = 0.0; // T1 - T2
};

struct SemilinearReport {
    GroundstateVector solution;
    Branch branch = Branch::MP;
    bool converged = false;
    int iterations = 0;
    std::vector<double> step_trace; // ||u_{k+1} - u_k||_X per iteration
    double residual_x = 0.0;        // ||T(u) - u||_X at the returned iterate
    int bracket_violations = 0;     // total over all iterations (projected)
    double window = 0.0;            // delta actually used
    double window_statement = 0.0;  // min{delta0, kappa/(c0 K)}, kept for the record
    RatioRange ratio;
    double xnorm_bound = 0.0;       // K/|Lambda - mu| + 2 c0 K
    bool xnorm_bound_ok = false;
    std::optional<double> gsp;      // min u/phi >= kappa/(Lambda-mu) (MP)
    std::optional<double> gsn;      // max u/phi <= kappa/(Lambda-mu) (AMP)
    Uniqueness uniqueness;

    bool certified() const noexcept;
};

/// Damped bracketed fixed-point iteration u <- (1-theta) u + theta T(u).
/// Throws WindowViolation, NoConvergence, BracketEscape.
SemilinearReport solve_semilinear(const SemilinearProblem& p, const SemilinearOptions& options = {});

struct MonotoneOptions {
    std::optional<double> shift; // defaults to 1.5 x the estimated Lipschitz constant
    int max_iter = 5000;
    double tol_x = 1e-10;
    double order_tol = 1e-10;
};

struct MonotoneReport {
    GroundstateVector minimal;
    GroundstateVector maximal;
    int iterations_lower = 0;
    int iterations_upper = 0;
    double gap = 0.0; // ||maximal - minimal||_X
    double shift = 0.0;
    double lipschitz_estimate = 0.0;
    double worst_order_defect = 0.0; // largest observed ordering violation (<= order_tol)
};

/// u_{k+1} = (L - mu + M)^{-1}(f(., u_k) + M u_k) from both bracket corners
/// (MP branch only). Throws MonotonicityBroken, NoConvergence.
MonotoneReport monotone_solve(const SemilinearProblem& p, const MonotoneOptions& options = {});

} // namespace gsp
