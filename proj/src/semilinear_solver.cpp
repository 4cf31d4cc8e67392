#include "gsp/semilinear_solver.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace gsp {

const char* to_string(Branch b) noexcept { return b == Branch::MP ? "MP" : "AMP"; }

Bracket make_bracket(const Nonlinearity& nl, std::span<const double> phi, double Lambda, double mu) {
    const double gap = Lambda - mu;
    if (gap == 0.0) throw Error(ErrorKind::WindowViolation, "mu = Lambda has no bracket");
    Bracket b;
    if (gap > 0.0) {
        b.kind = Branch::MP;
        b.lower_coef = nl.kappa() / gap;
        b.upper_coef = nl.K() / gap;
    } else {
        b.kind = Branch::AMP;
        b.lower_coef = nl.K() / gap;
        b.upper_coef = nl.kappa() / gap;
    }
    b.lower.resize(phi.size());
    b.upper.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        b.lower[i] = b.lower_coef * phi[i];
        b.upper[i] = b.upper_coef * phi[i];
    }
    return b;
}

double window_semilinear(const Nonlinearity& nl, const WindowEstimate& w) {
    return std::min(w.delta0, nl.kappa() / (2.0 * w.c0 * nl.K()));
}

std::vector<double> apply_T(const DiscreteOperator& op, std::span<const double> phi, const Nonlinearity& nl,
                            double mu, std::span<const double> u) {
    return solve_shifted(op, mu, nl.evaluate(op.grid(), phi, u));
}

bool SemilinearReport::certified() const noexcept {
    return converged && bracket_violations == 0 && xnorm_bound_ok && (gsp.has_value() || gsn.has_value());
}

namespace {

struct IterationResult {
    std::vector<double> u;
    bool converged = false;
    int iterations = 0;
    int violations = 0;
    std::vector<double> trace;
};

double x_distance(std::span<const double> a, std::span<const double> b, std::span<const double> phi) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]) / phi[i]);
    return best;
}

IterationResult iterate(const DiscreteOperator& op, const Resolvent& res, std::span<const double> phi,
                        const Nonlinearity& nl, const Bracket& bracket, std::vector<double> u,
                        const SemilinearOptions& opt) {
    const Grid& grid = op.grid();
    const std::size_t n = grid.size();
    const double theta = opt.damping;
    IterationResult out;
    std::vector<double> f(n), next(n);

    for (int k = 0; k < opt.max_iter; ++k) {
        nl.evaluate_into(grid, phi, u, f);
        const std::vector<double> t = res.apply(f);
        int violations = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = (1.0 - theta) * u[i] + theta * t[i];
            const double slack = 1e-10 * std::max(std::abs(bracket.lower[i]), std::abs(bracket.upper[i]));
            if (v < bracket.lower[i] - slack) {
                ++violations;
                v = bracket.lower[i];
            } else if (v > bracket.upper[i] + slack) {
                ++violations;
                v = bracket.upper[i];
            }
            next[i] = v;
        }
        out.violations += violations;
        if (static_cast<double>(violations) > opt.escape_fraction * static_cast<double>(n)) {
            throw Error(ErrorKind::BracketEscape,
                        fmt::format("{} of {} nodes left the bracket at iteration {}", violations, n, k + 1));
        }
        const double step = x_distance(next, u, phi);
        out.trace.push_back(step);
        u.swap(next);
        out.iterations = k + 1;
        if (step < opt.tol_x) {
            out.converged = true;
            break;
        }
    }
    out.u = std::move(u);
    return out;
}

double nonlinear_pairing(const Grid& grid, std::span<const double> phi, const Nonlinearity& nl,
                         std::span<const double> u, std::span<const double> v) {
    const std::vector<double> fu = nl.evaluate(grid, phi, u);
    const std::vector<double> fv = nl.evaluate(grid, phi, v);
    const auto w = grid.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += w[i] * (fu[i] / u[i] - fv[i] / v[i]) * (u[i] * u[i] - v[i] * v[i]);
    }
    return s;
}

void check_window(const SemilinearProblem& p, double window) {
    const double gap = p.spectrum.Lambda - p.mu;
    if (gap == 0.0) throw Error(ErrorKind::WindowViolation, "mu must differ from Lambda");
    if (p.nl.has_lower_bound()) {
        if (!(std::abs(gap) < window)) {
            throw Error(ErrorKind::WindowViolation,
                        fmt::format("|Lambda - mu| = {:.6g} is not below the window {:.6g}", std::abs(gap), window));
        }
    } else if (!(gap > 0.0 && gap < p.window.delta0)) {
        throw Error(ErrorKind::WindowViolation,
                    "without a lower bound on f only Lambda - delta0 < mu < Lambda is supported");
    }
}

} // namespace

BrezisOswald brezis_oswald_check(const DiscreteOperator& op, std::span<const double> u_in,
                                 std::span<const double> v_in) {
    const std::size_t n = u_in.size();
    if (v_in.size() != n || n != op.size()) throw Error(ErrorKind::InvalidArgument, "size mismatch");
    const bool positive = u_in[0] > 0.0;
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool ok = positive ? (u_in[i] > 0.0 && v_in[i] > 0.0) : (u_in[i] < 0.0 && v_in[i] < 0.0);
        if (!ok) throw Error(ErrorKind::SignMixed, fmt::format("sign change at node {}", i));
        u[i] = std::abs(u_in[i]);
        v[i] = std::abs(v_in[i]);
    }

    const Grid& grid = op.grid();
    const std::vector<double> lu = op.apply_laplacian(u);
    const std::vector<double> lv = op.apply_laplacian(v);
    const auto w = grid.weights();
    BrezisOswald out;
    for (std::size_t i = 0; i < n; ++i) {
        out.lhs += w[i] * (lu[i] / u[i] - lv[i] / v[i]) * (u[i] * u[i] - v[i] * v[i]);
    }

    // midpoint differences between neighbouring nodes
    const auto radii = grid.radii();
    const double h = grid.h();
    const int dim = grid.space_dim();
    double g = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double rm = 0.5 * (radii[i] + radii[i + 1]);
        const double weight = grid.sphere_area() * std::pow(rm, dim - 1) * h;
        const double um = 0.5 * (u[i] + u[i + 1]);
        const double vm = 0.5 * (v[i] + v[i + 1]);
        const double d_uv = (u[i + 1] / v[i + 1] - u[i] / v[i]) / h;
        const double d_vu = (v[i + 1] / u[i + 1] - v[i] / u[i]) / h;
        g += weight * (vm * vm * d_uv * d_uv + um * um * d_vu * d_vu);
    }
    out.gradient_form = g;
    out.identity_gap = std::abs(out.lhs - out.gradient_form);
    return out;
}

SemilinearReport solve_semilinear(const SemilinearProblem& p, const SemilinearOptions& opt) {
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "damping must lie in (0, 1]");
    }
    const Grid& grid = p.op.grid();
    const std::vector<double>& phi = p.spectrum.phi;
    const double gap = p.spectrum.Lambda - p.mu;

    SemilinearReport rep;
    rep.window = window_semilinear(p.nl, p.window);
    rep.window_statement = std::min(p.window.delta0, p.nl.kappa() / (p.window.c0 * p.nl.K()));
    check_window(p, rep.window);

    const double phi_max = *std::max_element(phi.begin(), phi.end());
    check_nonlinearity(p.nl, grid, 10.0 * p.nl.K() / std::abs(gap) * phi_max + 10.0);

    const Bracket bracket = make_bracket(p.nl, phi, p.spectrum.Lambda, p.mu);
    rep.branch = bracket.kind;
    const Resolvent res(p.op, p.mu);

    std::vector<double> start;
    switch (opt.start) {
    case StartPoint::Lower: start = bracket.lower; break;
    case StartPoint::Upper: start = bracket.upper; break;
    case StartPoint::Custom:
        if (opt.custom_start.size() != grid.size()) {
            throw Error(ErrorKind::InvalidArgument, "custom start has the wrong size");
        }
        start = opt.custom_start;
        break;
    }

    IterationResult main = iterate(p.op, res, phi, p.nl, bracket, std::move(start), opt);
    rep.iterations = main.iterations;
    rep.step_trace = main.trace;
    rep.bracket_violations = main.violations;
    rep.converged = main.converged;
    if (!main.converged) {
        throw Error(ErrorKind::NoConvergence,
                    fmt::format("no convergence in {} iterations at mu = {:.12g}; last step {:.3e}", opt.max_iter,
                                p.mu, main.trace.empty() ? 0.0 : main.trace.back()));
    }

    const std::vector<double> tu = res.apply(p.nl.evaluate(grid, phi, main.u));
    rep.residual_x = x_distance(tu, main.u, phi);
    rep.solution = decompose(grid, main.u, phi);
    rep.ratio = ratio_range(main.u, phi);

    const double K = p.nl.K();
    const double kappa = p.nl.kappa();
    rep.xnorm_bound = K / std::abs(gap) + 2.0 * p.window.c0 * K;
    rep.xnorm_bound_ok = rep.solution.x_norm <= rep.xnorm_bound * (1.0 + 1e-3);
    if (p.nl.has_lower_bound()) {
        const double level = kappa / gap;
        if (bracket.kind == Branch::MP) {
            if (rep.ratio.min >= level * (1.0 - 1e-6)) rep.gsp = level;
        } else {
            if (rep.ratio.max <= level * (1.0 - 1e-6)) rep.gsn = level;
        }
    }

    if (opt.two_start) {
        SemilinearOptions other = opt;
        other.two_start = false;
        std::vector<double> corner = opt.start == StartPoint::Upper ? bracket.lower : bracket.upper;
        IterationResult second = iterate(p.op, res, phi, p.nl, bracket, std::move(corner), other);
        if (!second.converged) {
            throw Error(ErrorKind::NoConvergence, "second-start iteration did not converge");
        }
        rep.bracket_violations += second.violations;
        rep.uniqueness.computed = true;
        rep.uniqueness.two_start_gap = x_distance(main.u, second.u, phi);
        const bool one_signed = std::all_of(main.u.begin(), main.u.end(), [&](double v) {
            return bracket.kind == Branch::MP ? v > 0.0 : v < 0.0;
        });
        if (one_signed) {
            const BrezisOswald bo = brezis_oswald_check(p.op, main.u, second.u);
            rep.uniqueness.brezis_oswald_lhs = bo.lhs;
            rep.uniqueness.nonlinear_term = nonlinear_pairing(grid, phi, p.nl, main.u, second.u);
            rep.uniqueness.brezis_oswald_residual = bo.lhs - rep.uniqueness.nonlinear_term;
        }
    }
    return rep;
}

MonotoneReport monotone_solve(const SemilinearProblem& p, const MonotoneOptions& opt) {
    const double gap = p.spectrum.Lambda - p.mu;
    if (!(gap > 0.0)) throw Error(ErrorKind::InvalidArgument, "monotone iteration needs mu < Lambda");
    const Grid& grid = p.op.grid();
    const std::vector<double>& phi = p.spectrum.phi;
    const std::size_t n = grid.size();
    const Bracket bracket = make_bracket(p.nl, phi, p.spectrum.Lambda, p.mu);

    MonotoneReport rep;
    const double u_lo = *std::min_element(bracket.lower.begin(), bracket.lower.end());
    const double u_hi = *std::max_element(bracket.upper.begin(), bracket.upper.end());
    rep.lipschitz_estimate = estimate_lipschitz(p.nl, grid, phi, u_lo, u_hi);
    rep.shift = opt.shift.value_or(1.5 * rep.lipschitz_estimate);
    if (!(rep.shift >= 0.0)) throw Error(ErrorKind::InvalidArgument, "shift must be nonnegative");

    const Resolvent res(p.op, p.mu - rep.shift);
    std::vector<double> lo = bracket.lower;
    std::vector<double> hi = bracket.upper;
    std::vector<double> f(n), rhs(n);

    auto step = [&](std::vector<double>& u) {
        p.nl.evaluate_into(grid, phi, u, f);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = f[i] + rep.shift * u[i];
        return res.apply(rhs);
    };

    bool lo_done = false, hi_done = false;
    for (int k = 0; k < opt.max_iter && !(lo_done && hi_done); ++k) {
        if (!lo_done) {
            std::vector<double> next = step(lo);
            for (std::size_t i = 0; i < n; ++i) {
                const double defect = lo[i] - next[i];
                rep.worst_order_defect = std::max(rep.worst_order_defect, defect);
                if (defect > opt.order_tol * std::max(1.0, std::abs(lo[i]))) {
                    throw Error(ErrorKind::MonotonicityBroken,
                                fmt::format("lower iterate decreased by {:.3e} at node {} (shift {:.4g})", defect, i,
                                            rep.shift));
                }
            }
            const double d = x_distance(next, lo, phi);
            lo.swap(next);
            rep.iterations_lower = k + 1;
            lo_done = d < opt.tol_x;
        }
        if (!hi_done) {
            std::vector<double> next = step(hi);
            for (std::size_t i = 0; i < n; ++i) {
                const double defect = next[i] - hi[i];
                rep.worst_order_defect = std::max(rep.worst_order_defect, defect);
                if (defect > opt.order_tol * std::max(1.0, std::abs(hi[i]))) {
                    throw Error(ErrorKind::MonotonicityBroken,
                                fmt::format("upper iterate increased by {:.3e} at node {} (shift {:.4g})", defect, i,
                                            rep.shift));
                }
            }
            const double d = x_distance(next, hi, phi);
            hi.swap(next);
            rep.iterations_upper = k + 1;
            hi_done = d < opt.tol_x;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double defect = lo[i] - hi[i];
            if (defect > opt.order_tol * std::max(1.0, std::abs(hi[i]))) {
                throw Error(ErrorKind::MonotonicityBroken,
                            fmt::format("lower iterate crossed the upper one at node {}", i));
            }
        }
    }
    if (!(lo_done && hi_done)) {
        throw Error(ErrorKind::NoConvergence,
                    fmt::format("monotone iteration not converged after {} steps", opt.max_iter));
    }
    rep.gap = x_distance(hi, lo, phi);
    rep.minimal = decompose(grid, lo, phi);
    rep.maximal = decompose(grid, hi, phi);
    return rep;
}

} // namespace gsp
