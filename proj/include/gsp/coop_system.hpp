#pragma once

#include "gsp/groundstate_space.hpp"
#include "gsp/nonlinearity.hpp"
#include "gsp/semilinear_solver.hpp"
#include "gsp/spectral.hpp"

#include <array>
#include <span>
#include <vector>

namespace gsp {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// A = [[a, b], [c, d]] with b, c > 0.
struct CoopMatrix {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double disc = 0.0; // (a-d)^2 + 4bc
    double xi1 = 0.0;  // xi1 > xi2
    double xi2 = 0.0;
    std::array<double, 2> Y{};   // (b, (d - a + sqrt(disc))/2)
    Mat2 P{};                    // [[b, b], [xi1 - a, xi2 - a]]
    Mat2 P_inv{};
    double identity_error = 0.0; // worst of |AY - xi1 Y|, |P P_inv - I|, |P_inv A P - D|

    double y_max() const noexcept { return Y[0] > Y[1] ? Y[0] : Y[1]; }
    double y_min() const noexcept { return Y[0] < Y[1] ? Y[0] : Y[1]; }
};

/// Throws NotCooperative (b <= 0 or c <= 0) and VerificationFailed if the
/// eigen-identities miss 1e-12 (relative to the entry scale).
CoopMatrix analyze_matrix(double a, double b, double c, double d);

struct TransformedData {
    std::vector<double> g1;
    std::vector<double> g2;
    double kappa_prime = 0.0; // g1 >= kappa' phi
    double K_prime = 0.0;     // g1 <= K' phi and |g2| <= K' phi
    bool g2_bound_ok = true;  // |g2| <= K' phi checked nodewise
};

/// G = P^{-1} F nodewise and the transformed bounds for kappa phi <= f_i <= K phi.
TransformedData transform_data(const CoopMatrix& A, std::span<const double> f1, std::span<const double> f2,
                               std::span<const double> phi, double kappa, double K);

/// kappa' and K' alone.
std::array<double, 2> transformed_bounds(const CoopMatrix& A, double kappa, double K);

struct SystemLinearSolution {
    std::vector<double> u1, u2;
    std::vector<double> v1, v2;
};

/// (L - mu - A) U = F through the diagonalized scalar resolvents at xi1 + mu
/// and xi2 + mu, recombined as U = P V.
SystemLinearSolution system_linear_solve(const DiscreteOperator& op, const CoopMatrix& A, double mu,
                                         std::span<const double> f1, std::span<const double> f2);

struct SystemProblem {
    const DiscreteOperator& op;
    const SpectrumSummary& spectrum;
    const WindowEstimate& window;
    const CoopMatrix& A;
    const Nonlinearity& nl1;
    const Nonlinearity& nl2;
    double mu;

    double Lambda_star() const noexcept { return spectrum.Lambda - A.xi1; }
};

/// Common kappa, K of the two components (min of the kappas, max of the Ks).
std::array<double, 2> shared_bounds(const Nonlinearity& nl1, const Nonlinearity& nl2);

/// delta* = min{delta0, kappa'/(2 c0 K'), (xi1 - xi2)/2, lambda2 - Lambda}
double window_system(const SystemProblem& p);

/// Componentwise bounds of the rectangle K_S+ (mu < Lambda*) or K_S- (mu > Lambda*),
/// as multiples of phi.
struct Rectangle {
    Branch kind = Branch::MP;
    std::array<double, 2> lower_coef{};
    std::array<double, 2> upper_coef{};
};

Rectangle make_rectangle(const CoopMatrix& A, double kappa, double K, double Lambda_star, double mu);

struct CoupledUniqueness {
    double T1 = 0.0;          // BO(u1, v1)/b + BO(u2, v2)/c
    double T2 = 0.0;          // nonlinear difference term
    double cross_raw = 0.0;   // integral (u2/u1 - v2/v1)(u1^2 - v1^2) + (u1/u2 - v1/v2)(u2^2 - v2^2)
    double cross_sqrt = 0.0;  // the same as minus two squares
    double residual = 0.0;    // T1 - cross_raw - T2, zero for two exact solutions
};

/// Throws SignMixed unless all four components share one strict sign, and
/// VerificationFailed if T1 < -1e-8 or the cross term exceeds 1e-8.
CoupledUniqueness coupled_uniqueness_check(const DiscreteOperator& op, const CoopMatrix& A,
                                           std::span<const double> phi, const Nonlinearity& nl1,
                                           const Nonlinearity& nl2, std::span<const double> u1,
                                           std::span<const double> u2, std::span<const double> v1,
                                           std::span<const double> v2);

struct SystemReport {
    GroundstateVector u1, u2;
    GroundstateVector v1, v2;
    Branch branch = Branch::MP;
    Rectangle rectangle;
    double Lambda_star = 0.0;
    double window = 0.0;
    double kappa_prime = 0.0;
    double K_prime = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> step_trace;
    int rectangle_violations = 0;
    bool in_rectangle = false; // all four inequalities at every node of the final iterate
    bool signs_ok = false;     // u1, u2 > 0 (MP) or < 0 (AMP) everywhere
    double v2_bound = 0.0;     // 2K'/(xi1 - xi2) + 2 c0 K'
    bool v2_bound_ok = false;
    double v1_lower = 0.0;     // kappa'/|Lambda* - mu| - 2 c0 K'
    bool v1_lower_ok = false;
    bool uniqueness_computed = false;
    double two_start_gap = 0.0; // max over components of the X-distance
    CoupledUniqueness coupled;

    bool certified() const noexcept {
        return converged && rectangle_violations == 0 && in_rectangle && signs_ok && v2_bound_ok;
    }
};

/// Damped fixed-point iteration on W = (L - mu - A)^{-1} F(U) with rectangle
/// projection. Throws WindowViolation, NoConvergence, RectangleEscape.
SystemReport solve_system(const SystemProblem& p, const SemilinearOptions& options = {});

} // namespace gsp
