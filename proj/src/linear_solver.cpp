#include "gsp/linear_solver.hpp"

#include "gsp/errors.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace gsp {

LinearSolution solve_linear(const LinearProblem& p) {
    const Grid& grid = p.op.grid();
    if (p.f.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "forcing size mismatch");
    const std::vector<double>& phi = p.spectrum.phi;

    const std::vector<double> u = solve_shifted(p.op, p.mu, p.f);

    LinearSolution out;
    out.u = decompose(grid, u, phi);
    out.f1 = grid.inner(p.f, phi);
    out.expected_c1 = out.f1 / (p.spectrum.Lambda - p.mu);
    const double scale = std::max(std::abs(out.expected_c1), grid.l2_norm(u));
    out.component_error = scale > 0.0 ? std::abs(out.u.c1 - out.expected_c1) / scale : 0.0;
    if (out.component_error > 1e-6) {
        throw Error(ErrorKind::VerificationFailed,
                    fmt::format("component identity off by {:.3e} at mu = {:.12g}", out.component_error, p.mu));
    }
    return out;
}

LinearCertificate certify_theorem1(const LinearProblem& p, const WindowEstimate& w) {
    const Grid& grid = p.op.grid();
    const std::vector<double>& phi = p.spectrum.phi;
    const GroundstateVector fd = decompose(grid, p.f, phi);

    if (!(fd.c1 > 0.0)) {
        throw Error(ErrorKind::HypothesisViolated, fmt::format("f1 = {} must be positive", fd.c1));
    }
    if (!std::isfinite(fd.x_norm)) {
        throw Error(ErrorKind::HypothesisViolated, "forcing is not groundstate-bounded");
    }

    LinearCertificate cert;
    cert.f1 = fd.c1;
    cert.f_perp_x = x_norm(fd.perp, phi);
    // f parallel to phi up to projection roundoff
    if (cert.f_perp_x <= 64.0 * std::numeric_limits<double>::epsilon() * cert.f1) cert.f_perp_x = 0.0;
    const double spread = w.c0 * cert.f_perp_x;
    cert.delta1 = spread > 0.0 ? cert.f1 / spread : std::numeric_limits<double>::infinity();
    cert.window = std::min(w.delta0, cert.delta1);

    LinearSolution sol = solve_linear(p);
    cert.solution = std::move(sol.u);
    cert.ratio = ratio_range(cert.solution.values, phi);

    const double gap = p.spectrum.Lambda - p.mu;
    cert.in_window = std::abs(gap) > 0.0 && std::abs(gap) < cert.window;
    // the discrete solve is only good to roundoff, so compare with that much slack
    const double slack = 1e-10 * cert.f1 / std::abs(gap);
    if (gap > 0.0) {
        cert.bound = cert.f1 / gap - spread;
        if (cert.in_window) {
            if (cert.bound > 0.0 && cert.ratio.min >= cert.bound - slack) {
                cert.gsp = cert.bound;
            } else {
                cert.check_failed = true;
            }
        }
    } else {
        cert.bound = cert.f1 / gap + spread;
        if (cert.in_window) {
            if (cert.bound < 0.0 && cert.ratio.max <= cert.bound + slack) {
                cert.gsn = cert.bound;
            } else {
                cert.check_failed = true;
            }
        }
    }
    return cert;
}

} // namespace gsp
