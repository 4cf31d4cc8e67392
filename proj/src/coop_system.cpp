#include "gsp/coop_system.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

namespace gsp {

namespace {

Mat2 mul(const Mat2& x, const Mat2& y) {
    Mat2 z{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return z;
}

double x_distance(std::span<const double> a, std::span<const double> b, std::span<const double> phi) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]) / phi[i]);
    return best;
}

} // namespace

CoopMatrix analyze_matrix(double a, double b, double c, double d) {
    if (!(b > 0.0 && c > 0.0)) {
        throw Error(ErrorKind::NotCooperative, fmt::format("off-diagonal entries must be positive (b = {}, c = {})", b, c));
    }
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
        throw Error(ErrorKind::InvalidArgument, "matrix entries must be finite");
    }
    CoopMatrix m;
    m.a = a;
    m.b = b;
    m.c = c;
    m.d = d;
    m.disc = (a - d) * (a - d) + 4.0 * b * c;
    const double root = std::sqrt(m.disc);
    m.xi1 = 0.5 * (a + d + root);
    m.xi2 = 0.5 * (a + d - root);
    m.Y = {b, 0.5 * (d - a + root)};
    m.P = {{{b, b}, {m.xi1 - a, m.xi2 - a}}};
    const double s = 1.0 / (b * (m.xi1 - m.xi2));
    m.P_inv = {{{(a - m.xi2) * s, b * s}, {(m.xi1 - a) * s, -b * s}}};

    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), 1.0});
    double err = std::max(std::abs(a * m.Y[0] + b * m.Y[1] - m.xi1 * m.Y[0]),
                          std::abs(c * m.Y[0] + d * m.Y[1] - m.xi1 * m.Y[1])) / (scale * scale);
    const Mat2 id = mul(m.P, m.P_inv);
    const Mat2 A = {{{a, b}, {c, d}}};
    const Mat2 D = mul(m.P_inv, mul(A, m.P));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            err = std::max(err, std::abs(id[i][j] - (i == j ? 1.0 : 0.0)));
            const double target = i != j ? 0.0 : (i == 0 ? m.xi1 : m.xi2);
            err = std::max(err, std::abs(D[i][j] - target) / scale);
        }
    }
    m.identity_error = err;
    if (err > 1e-12) throw Error(ErrorKind::VerificationFailed, fmt::format("matrix identities off by {:.3e}", err));
    if (!(m.Y[1] > 0.0)) throw Error(ErrorKind::VerificationFailed, "principal eigenvector is not positive");
    return m;
}

std::array<double, 2> transformed_bounds(const CoopMatrix& A, double kappa, double K) {
    const double s = 1.0 / (A.b * (A.xi1 - A.xi2));
    const double row1 = (A.a - A.xi2) + A.b; // both coefficients of g1 are positive
    const double kp = row1 * kappa * s;
    double kP = row1 * K * s;
    // g2 is linear in (f1, f2); its extremes over the box sit at the corners
    for (double f1 : {kappa, K})
        for (double f2 : {kappa, K}) kP = std::max(kP, std::abs((A.xi1 - A.a) * f1 - A.b * f2) * s);
    return {kp, kP};
}

TransformedData transform_data(const CoopMatrix& A, std::span<const double> f1, std::span<const double> f2,
                               std::span<const double> phi, double kappa, double K) {
    const std::size_t n = f1.size();
    if (f2.size() != n || phi.size() != n) throw Error(ErrorKind::InvalidArgument, "size mismatch");
    TransformedData out;
    out.g1.resize(n);
    out.g2.resize(n);
    const auto [kp, kP] = transformed_bounds(A, kappa, K);
    out.kappa_prime = kp;
    out.K_prime = kP;
    for (std::size_t i = 0; i < n; ++i) {
        out.g1[i] = A.P_inv[0][0] * f1[i] + A.P_inv[0][1] * f2[i];
        out.g2[i] = A.P_inv[1][0] * f1[i] + A.P_inv[1][1] * f2[i];
        if (std::abs(out.g2[i]) > kP * phi[i] * (1.0 + 1e-12) + 1e-300) out.g2_bound_ok = false;
    }
    return out;
}

namespace {

struct Diagonalized {
    Resolvent r1;
    Resolvent r2;

    Diagonalized(const DiscreteOperator& op, const CoopMatrix& A, double mu)
        : r1(op, A.xi1 + mu), r2(op, A.xi2 + mu) {}

    SystemLinearSolution solve(const CoopMatrix& A, std::span<const double> f1, std::span<const double> f2) const {
        const std::size_t n = f1.size();
        std::vector<double> g1(n), g2(n);
        for (std::size_t i = 0; i < n; ++i) {
            g1[i] = A.P_inv[0][0] * f1[i] + A.P_inv[0][1] * f2[i];
            g2[i] = A.P_inv[1][0] * f1[i] + A.P_inv[1][1] * f2[i];
        }
        SystemLinearSolution s;
        auto second = std::async(std::launch::async, [&] { return r2.apply(g2); });
        s.v1 = r1.apply(g1);
        s.v2 = second.get();
        s.u1.resize(n);
        s.u2.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.u1[i] = A.P[0][0] * s.v1[i] + A.P[0][1] * s.v2[i];
            s.u2[i] = A.P[1][0] * s.v1[i] + A.P[1][1] * s.v2[i];
        }
        return s;
    }
};

} // namespace

SystemLinearSolution system_linear_solve(const DiscreteOperator& op, const CoopMatrix& A, double mu,
                                         std::span<const double> f1, std::span<const double> f2) {
    if (f1.size() != op.size() || f2.size() != op.size()) throw Error(ErrorKind::InvalidArgument, "size mismatch");
    return Diagonalized(op, A, mu).solve(A, f1, f2);
}

std::array<double, 2> shared_bounds(const Nonlinearity& nl1, const Nonlinearity& nl2) {
    return {std::min(nl1.kappa(), nl2.kappa()), std::max(nl1.K(), nl2.K())};
}

double window_system(const SystemProblem& p) {
    const auto [kappa, K] = shared_bounds(p.nl1, p.nl2);
    const auto [kp, kP] = transformed_bounds(p.A, kappa, K);
    return std::min({p.window.delta0, kp / (2.0 * p.window.c0 * kP), 0.5 * (p.A.xi1 - p.A.xi2),
                     p.spectrum.lambda2 - p.spectrum.Lambda});
}

Rectangle make_rectangle(const CoopMatrix& A, double kappa, double K, double Lambda_star, double mu) {
    const double gap = Lambda_star - mu;
    if (gap == 0.0) throw Error(ErrorKind::WindowViolation, "mu = Lambda* has no rectangle");
    Rectangle r;
    r.kind = gap > 0.0 ? Branch::MP : Branch::AMP;
    for (int i = 0; i < 2; ++i) {
        const double small = kappa * A.Y[i] / (A.y_max() * gap);
        const double large = K * A.Y[i] / (A.y_min() * gap);
        r.lower_coef[i] = gap > 0.0 ? small : large;
        r.upper_coef[i] = gap > 0.0 ? large : small;
    }
    return r;
}

CoupledUniqueness coupled_uniqueness_check(const DiscreteOperator& op, const CoopMatrix& A,
                                           std::span<const double> phi, const Nonlinearity& nl1,
                                           const Nonlinearity& nl2, std::span<const double> u1,
                                           std::span<const double> u2, std::span<const double> v1,
                                           std::span<const double> v2) {
    const std::size_t n = op.size();
    if (u1.size() != n || u2.size() != n || v1.size() != n || v2.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "size mismatch");
    }
    const double sign = u1[0] > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sign * u1[i] > 0.0 && sign * u2[i] > 0.0 && sign * v1[i] > 0.0 && sign * v2[i] > 0.0)) {
            throw Error(ErrorKind::SignMixed, fmt::format("components change sign at node {}", i));
        }
    }
    CoupledUniqueness out;
    out.T1 = brezis_oswald_check(op, u1, v1).lhs / A.b + brezis_oswald_check(op, u2, v2).lhs / A.c;

    const Grid& grid = op.grid();
    const auto w = grid.weights();
    const std::vector<double> fu1 = nl1.evaluate(grid, phi, u1), fv1 = nl1.evaluate(grid, phi, v1);
    const std::vector<double> fu2 = nl2.evaluate(grid, phi, u2), fv2 = nl2.evaluate(grid, phi, v2);
    for (std::size_t i = 0; i < n; ++i) {
        // work with |.|; the quotients below are sign-invariant and the squares match
        const double a1 = std::abs(u1[i]), a2 = std::abs(u2[i]), b1 = std::abs(v1[i]), b2 = std::abs(v2[i]);
        out.T2 += w[i] * ((fu1[i] / (A.b * u1[i]) - fv1[i] / (A.b * v1[i])) * (a1 * a1 - b1 * b1) +
                          (fu2[i] / (A.c * u2[i]) - fv2[i] / (A.c * v2[i])) * (a2 * a2 - b2 * b2));
        out.cross_raw += w[i] * ((a2 / a1 - b2 / b1) * (a1 * a1 - b1 * b1) + (a1 / a2 - b1 / b2) * (a2 * a2 - b2 * b2));
        const double s1 = std::sqrt(a2 * b1 * b1 / a1) - std::sqrt(a1 * b2 * b2 / a2);
        const double s2 = std::sqrt(b2 * a1 * a1 / b1) - std::sqrt(b1 * a2 * a2 / b2);
        out.cross_sqrt -= w[i] * (s1 * s1 + s2 * s2);
    }
    out.residual = out.T1 - out.cross_raw - out.T2;
    if (out.T1 < -1e-8) throw Error(ErrorKind::VerificationFailed, fmt::format("T1 = {:.3e} is negative", out.T1));
    if (out.cross_raw > 1e-8) {
        throw Error(ErrorKind::VerificationFailed, fmt::format("cross term {:.3e} is positive", out.cross_raw));
    }
    return out;
}

namespace {

struct SystemIteration {
    SystemLinearSolution s;
    bool converged = false;
    int iterations = 0;
    int violations = 0;
    std::vector<double> trace;
};

SystemIteration iterate_system(const SystemProblem& p, const Diagonalized& diag, const Rectangle& rect,
                               std::vector<double> u1, std::vector<double> u2, const SemilinearOptions& opt) {
    const Grid& grid = p.op.grid();
    const std::vector<double>& phi = p.spectrum.phi;
    const std::size_t n = grid.size();
    const double theta = opt.damping;
    SystemIteration out;
    std::vector<double> f1(n), f2(n);

    auto project = [&](double v, int comp, std::size_t i, int& count) {
        const double lo = rect.lower_coef[comp] * phi[i];
        const double hi = rect.upper_coef[comp] * phi[i];
        const double slack = 1e-10 * std::max(std::abs(lo), std::abs(hi));
        if (v < lo - slack) {
            ++count;
            return lo;
        }
        if (v > hi + slack) {
            ++count;
            return hi;
        }
        return v;
    };

    for (int k = 0; k < opt.max_iter; ++k) {
        p.nl1.evaluate_into(grid, phi, u1, f1);
        p.nl2.evaluate_into(grid, phi, u2, f2);
        SystemLinearSolution t = diag.solve(p.A, f1, f2);
        int violations = 0;
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double n1 = project((1.0 - theta) * u1[i] + theta * t.u1[i], 0, i, violations);
            const double n2 = project((1.0 - theta) * u2[i] + theta * t.u2[i], 1, i, violations);
            step = std::max({step, std::abs(n1 - u1[i]) / phi[i], std::abs(n2 - u2[i]) / phi[i]});
            u1[i] = n1;
            u2[i] = n2;
        }
        out.violations += violations;
        if (static_cast<double>(violations) > opt.escape_fraction * static_cast<double>(2 * n)) {
            throw Error(ErrorKind::RectangleEscape,
                        fmt::format("{} of {} values left the rectangle at iteration {}", violations, 2 * n, k + 1));
        }
        out.trace.push_back(step);
        out.iterations = k + 1;
        if (step < opt.tol_x) {
            out.converged = true;
            break;
        }
    }
    // V of the final iterate, U itself is the projected iterate
    const std::size_t m = u1.size();
    out.s.v1.resize(m);
    out.s.v2.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.s.v1[i] = p.A.P_inv[0][0] * u1[i] + p.A.P_inv[0][1] * u2[i];
        out.s.v2[i] = p.A.P_inv[1][0] * u1[i] + p.A.P_inv[1][1] * u2[i];
    }
    out.s.u1 = std::move(u1);
    out.s.u2 = std::move(u2);
    return out;
}

} // namespace

SystemReport solve_system(const SystemProblem& p, const SemilinearOptions& opt) {
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "damping must lie in (0, 1]");
    }
    if (opt.start == StartPoint::Custom) throw Error(ErrorKind::InvalidArgument, "systems start from a corner");

    const Grid& grid = p.op.grid();
    const std::vector<double>& phi = p.spectrum.phi;
    const auto [kappa, K] = shared_bounds(p.nl1, p.nl2);

    SystemReport rep;
    rep.Lambda_star = p.Lambda_star();
    const double gap = rep.Lambda_star - p.mu;
    const auto [kp, kP] = transformed_bounds(p.A, kappa, K);
    rep.kappa_prime = kp;
    rep.K_prime = kP;
    rep.window = window_system(p);
    if (gap == 0.0) throw Error(ErrorKind::WindowViolation, "mu must differ from Lambda*");
    if (kappa > 0.0) {
        if (!(std::abs(gap) < rep.window)) {
            throw Error(ErrorKind::WindowViolation,
                        fmt::format("|Lambda* - mu| = {:.6g} is not below the window {:.6g}", std::abs(gap), rep.window));
        }
    } else {
        throw Error(ErrorKind::HypothesisViolated, "systems need a positive lower bound kappa");
    }

    const double phi_max = *std::max_element(phi.begin(), phi.end());
    const double extent = 10.0 * K / (std::abs(gap) * p.A.y_min()) * p.A.y_max() * phi_max + 10.0;
    check_nonlinearity(p.nl1, grid, extent);
    check_nonlinearity(p.nl2, grid, extent);

    rep.rectangle = make_rectangle(p.A, kappa, K, rep.Lambda_star, p.mu);
    rep.branch = rep.rectangle.kind;
    const Diagonalized diag(p.op, p.A, p.mu);

    auto corner = [&](bool upper) {
        std::array<std::vector<double>, 2> c;
        for (int j = 0; j < 2; ++j) {
            const double coef = upper ? rep.rectangle.upper_coef[j] : rep.rectangle.lower_coef[j];
            c[j].resize(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i) c[j][i] = coef * phi[i];
        }
        return c;
    };

    // the MP start kappa/(max y (Lambda* - mu)) Y phi is the lower corner
    const bool start_upper = opt.start == StartPoint::Upper;
    auto c0 = corner(start_upper);
    SystemIteration main = iterate_system(p, diag, rep.rectangle, std::move(c0[0]), std::move(c0[1]), opt);
    rep.iterations = main.iterations;
    rep.step_trace = main.trace;
    rep.rectangle_violations = main.violations;
    rep.converged = main.converged;
    if (!main.converged) {
        throw Error(ErrorKind::NoConvergence,
                    fmt::format("system iteration not converged in {} steps at mu = {:.12g}; last step {:.3e}",
                                opt.max_iter, p.mu, main.trace.empty() ? 0.0 : main.trace.back()));
    }

    rep.u1 = decompose(grid, main.s.u1, phi);
    rep.u2 = decompose(grid, main.s.u2, phi);
    rep.v1 = decompose(grid, main.s.v1, phi);
    rep.v2 = decompose(grid, main.s.v2, phi);

    rep.in_rectangle = true;
    rep.signs_ok = true;
    const double sign = rep.branch == Branch::MP ? 1.0 : -1.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r1 = main.s.u1[i] / phi[i], r2 = main.s.u2[i] / phi[i];
        const auto& R = rep.rectangle;
        auto inside = [](double r, double lo, double hi) {
            return r >= lo - 1e-9 * std::abs(lo) && r <= hi + 1e-9 * std::abs(hi);
        };
        if (!inside(r1, R.lower_coef[0], R.upper_coef[0]) || !inside(r2, R.lower_coef[1], R.upper_coef[1])) {
            rep.in_rectangle = false;
        }
        if (!(sign * main.s.u1[i] > 0.0 && sign * main.s.u2[i] > 0.0)) rep.signs_ok = false;
    }

    rep.v2_bound = 2.0 * kP / (p.A.xi1 - p.A.xi2) + 2.0 * p.window.c0 * kP;
    rep.v2_bound_ok = rep.v2.x_norm <= rep.v2_bound * (1.0 + 1e-3);
    rep.v1_lower = kp / std::abs(gap) - 2.0 * p.window.c0 * kP;
    rep.v1_lower_ok = rep.v1.x_norm >= rep.v1_lower * (1.0 - 1e-3);

    if (opt.two_start) {
        auto c1 = corner(!start_upper);
        SemilinearOptions other = opt;
        other.two_start = false;
        SystemIteration second = iterate_system(p, diag, rep.rectangle, std::move(c1[0]), std::move(c1[1]), other);
        if (!second.converged) throw Error(ErrorKind::NoConvergence, "second-start system iteration did not converge");
        rep.rectangle_violations += second.violations;
        rep.uniqueness_computed = true;
        rep.two_start_gap = std::max(x_distance(main.s.u1, second.s.u1, phi), x_distance(main.s.u2, second.s.u2, phi));
        if (rep.signs_ok) {
            rep.coupled = coupled_uniqueness_check(p.op, p.A, phi, p.nl1, p.nl2, main.s.u1, main.s.u2, second.s.u1,
                                                   second.s.u2);
        }
    }
    return rep;
}

} // namespace gsp
