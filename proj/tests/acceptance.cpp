// One line per acceptance criterion; exit status is nonzero if any fails.
#include "gsp/coop_system.hpp"
#include "gsp/experiment.hpp"
#include "gsp/linear_solver.hpp"
#include "gsp/semilinear_solver.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace gsp;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, const std::function<std::string(bool&)>& body) {
    bool ok = true;
    std::string detail;
    try {
        detail = body(ok);
    } catch (const std::exception& e) {
        ok = false;
        detail = fmt::format("threw {}", e.what());
    }
    if (!ok) ++failures;
    fmt::print("{} criterion {:>2}: {} ({})\n", ok ? "PASS" : "FAIL", id, title, detail);
    std::fflush(stdout);
}

double xdist(std::span<const double> a, std::span<const double> b, std::span<const double> phi) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return x_norm(d, phi);
}

struct Quartic {
    RadialPotential pot = RadialPotential::power(1.0, 4.0, 0.0);
    Grid grid;
    SpectrumSummary spec;
    DiscreteOperator op;
    WindowEstimate win;

    explicit Quartic(double ppu)
        : grid(build_grid(pot, 3, 20.0, ppu)), spec(compute_spectrum(grid, pot)), op(assemble(grid, pot, 0)),
          win(estimate_c0_delta0(spec, op)) {}
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    const Quartic Q(400.0);
    const auto& phi = Q.spec.phi;
    const std::size_t n = phi.size();
    const Nonlinearity rational = Nonlinearity::rational(1.0, 2.0);
    fmt::print("setup: q = 1 + r^4, N = 3, n = {}, Lambda = {:.10f}, lambda2 = {:.10f}, delta0 = {:.6f}, c0 = {:.6f}\n",
               n, Q.spec.Lambda, Q.spec.lambda2, Q.win.delta0, Q.win.c0);

    report(1, "oscillator eigenvalues", [](bool& ok) {
        const RadialPotential q2 = RadialPotential::power(0.0, 2.0, 0.0);
        const SpectrumSummary s1 = compute_spectrum(Grid(1, 10.0, 2000), q2);
        const SpectrumSummary s3 = compute_spectrum(Grid(3, 10.0, 2000), q2);
        ok = std::abs(s1.Lambda - 1.0) <= 1e-3 && std::abs(s1.lambda2 - 3.0) <= 1e-3 && s1.lambda2_sector == 1 &&
             std::abs(s3.Lambda - 3.0) <= 1e-3 && std::abs(s3.lambda2 - 5.0) <= 1e-3 && s3.lambda2_sector == 1;
        return fmt::format("N=1: {:.6f}, {:.6f} (sector {}); N=3: {:.6f}, {:.6f} (l = {})", s1.Lambda, s1.lambda2,
                           s1.lambda2_sector, s3.Lambda, s3.lambda2, s3.lambda2_sector);
    });

    report(2, "linear exactness for f = phi", [&](bool& ok) {
        double worst = 0.0;
        for (double sgn : {-1.0, 1.0}) {
            const LinearSolution s = solve_linear({Q.op, Q.spec, Q.spec.Lambda + sgn * 0.1, phi});
            std::vector<double> target(n);
            for (std::size_t i = 0; i < n; ++i) target[i] = -sgn * 10.0 * phi[i];
            worst = std::max(worst, xdist(s.u.values, target, phi));
        }
        ok = worst <= 1e-6;
        return fmt::format("max ||u -+ 10 phi||_X = {:.3e}", worst);
    });

    report(3, "linear certificate on both sides", [&](bool& ok) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = phi[i] + 0.5 * Q.spec.radial_u[1][i];
        const double window = certify_theorem1({Q.op, Q.spec, Q.spec.Lambda - 1e-3, f}, Q.win).window;
        int passed = 0;
        for (int k = 1; k <= 8; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                const LinearCertificate c =
                    certify_theorem1({Q.op, Q.spec, Q.spec.Lambda + sgn * window * k / 9.0, f}, Q.win);
                const bool hit = c.in_window && (sgn < 0 ? c.gsp.has_value() && c.ratio.min >= c.bound
                                                          : c.gsn.has_value() && c.ratio.max <= c.bound);
                passed += hit ? 1 : 0;
            }
        }
        ok = passed == 16;
        return fmt::format("window {:.6f}, {}/16 mu values certified", window, passed);
    });

    SemilinearOptions sopt;
    sopt.tol_x = 1e-9;
    const double mu_mp = Q.spec.Lambda - 0.1;
    const double mu_amp = Q.spec.Lambda + 0.05;
    std::optional<SemilinearReport> mp, amp;

    report(4, "semilinear bounds on both branches", [&](bool& ok) {
        mp = solve_semilinear({Q.op, Q.spec, Q.win, rational, mu_mp}, sopt);
        amp = solve_semilinear({Q.op, Q.spec, Q.win, rational, mu_amp}, sopt);
        const double delta = window_semilinear(rational, Q.win);
        ok = delta > 0.1 && mp->converged && amp->converged && mp->iterations < 500 && amp->iterations < 500 &&
             mp->bracket_violations == 0 && amp->bracket_violations == 0 &&
             mp->solution.x_norm <= mp->xnorm_bound * (1.0 + 1e-3) &&
             amp->solution.x_norm <= amp->xnorm_bound * (1.0 + 1e-3) && mp->ratio.min >= 10.0 * (1.0 - 1e-6) &&
             amp->ratio.max <= -20.0 * (1.0 - 1e-6);
        return fmt::format("delta {:.4f}; MP: {} it, min u/phi {:.6f}, ||u||_X {:.4f} <= {:.4f}; AMP: {} it, max u/phi "
                           "{:.6f}, ||u||_X {:.4f} <= {:.4f}",
                           delta, mp->iterations, mp->ratio.min, mp->solution.x_norm, mp->xnorm_bound, amp->iterations,
                           amp->ratio.max, amp->solution.x_norm, amp->xnorm_bound);
    });

    report(5, "uniqueness diagnostics", [&](bool& ok) {
        if (!mp) mp = solve_semilinear({Q.op, Q.spec, Q.win, rational, mu_mp}, sopt);
        if (!amp) amp = solve_semilinear({Q.op, Q.spec, Q.win, rational, mu_amp}, sopt);
        const MonotoneReport mono = monotone_solve({Q.op, Q.spec, Q.win, rational, mu_mp});
        double bo = 0.0;
        double gap2 = 0.0;
        for (const auto* r : {&*mp, &*amp}) {
            bo = std::max({bo, std::abs(r->uniqueness.brezis_oswald_lhs), std::abs(r->uniqueness.nonlinear_term)});
            gap2 = std::max(gap2, r->uniqueness.two_start_gap);
        }
        // identity gap on a grid pair h, h/2
        double igap[2];
        const std::size_t sizes[2] = {299, 599};
        for (int k = 0; k < 2; ++k) {
            const Grid g(3, Q.grid.r_max(), sizes[k]);
            const SpectrumSummary sp = compute_spectrum(g, Q.pot);
            const DiscreteOperator op = assemble(g, Q.pot, 0);
            std::vector<double> v(sp.phi.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = sp.phi[i] * (1.0 + 0.1 * g.radii()[i] * g.radii()[i]);
            igap[k] = brezis_oswald_check(op, sp.phi, v).identity_gap;
        }
        ok = gap2 <= 1e-7 && mono.worst_order_defect <= 1e-10 && bo <= 1e-8 && igap[1] <= 0.5 * igap[0];
        return fmt::format("two-start gap {:.2e}; monotone gap {:.2e}, order defect {:.1e}; |BO sides| <= {:.1e}; "
                           "identity gap {:.3e} -> {:.3e}",
                           gap2, mono.gap, mono.worst_order_defect, bo, igap[0], igap[1]);
    });

    report(6, "cooperative matrix algebra", [](bool& ok) {
        const CoopMatrix a = analyze_matrix(0, 1, 4, 0);
        const CoopMatrix b = analyze_matrix(1, 2, 3, 2);
        ok = std::abs(a.xi1 - 2.0) <= 1e-12 && std::abs(a.Y[0] - 1.0) <= 1e-12 && std::abs(a.Y[1] - 2.0) <= 1e-12 &&
             std::abs(b.xi1 - 4.0) <= 1e-12 && std::abs(b.Y[0] - 2.0) <= 1e-12 && std::abs(b.Y[1] - 3.0) <= 1e-12 &&
             a.identity_error <= 1e-12 && b.identity_error <= 1e-12;
        return fmt::format("xi1 = {}, {}; identity errors {:.1e}, {:.1e}", a.xi1, b.xi1, a.identity_error,
                           b.identity_error);
    });

    const CoopMatrix A = analyze_matrix(0, 1, 4, 0);
    const double Ls = Q.spec.Lambda - A.xi1;

    report(7, "system principal direction", [&](bool& ok) {
        const Nonlinearity y1 = Nonlinearity::constant(A.Y[0]);
        const Nonlinearity y2 = Nonlinearity::constant(A.Y[1]);
        SemilinearOptions o;
        o.tol_x = 1e-11;
        o.max_iter = 2000;
        const SystemReport r = solve_system({Q.op, Q.spec, Q.win, A, y1, y2, Ls - 0.1}, o);
        std::vector<double> t1(n), t2(n);
        for (std::size_t i = 0; i < n; ++i) {
            t1[i] = 10.0 * A.Y[0] * phi[i];
            t2[i] = 10.0 * A.Y[1] * phi[i];
        }
        const double e1 = xdist(r.u1.values, t1, phi), e2 = xdist(r.u2.values, t2, phi);
        ok = e1 <= 1e-6 && e2 <= 1e-6;
        return fmt::format("||u1 - 10 y1 phi||_X = {:.2e}, ||u2 - 10 y2 phi||_X = {:.2e}", e1, e2);
    });

    report(8, "system rectangles on both branches", [&](bool& ok) {
        std::string detail;
        for (double off : {-0.1, -0.05, 0.05, 0.1}) {
            const SystemReport r = solve_system({Q.op, Q.spec, Q.win, A, rational, rational, Ls + off}, sopt);
            const bool good = r.in_rectangle && r.rectangle_violations == 0 && r.signs_ok && r.v2_bound_ok &&
                              r.two_start_gap <= 1e-7 && r.coupled.cross_raw <= 1e-8;
            ok = ok && good;
            detail += fmt::format("{}{:+.2f}: ||v2||_X {:.3f} <= {:.3f}, gap {:.1e}, cross {:.1e}",
                                  detail.empty() ? "" : "; ", off, r.v2.x_norm, r.v2_bound, r.two_start_gap,
                                  r.coupled.cross_raw);
        }
        return detail;
    });

    report(9, "diagonalized solve vs block solve", [&](bool& ok) {
        const double mu = Ls - 0.1;
        std::vector<double> f1(n), f2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = Q.grid.radii()[i];
            f1[i] = phi[i] * (1.5 + 0.5 * std::cos(2.0 * r));
            f2[i] = phi[i] * (1.0 + r * r / 9.0);
        }
        const SystemLinearSolution s = system_linear_solve(Q.op, A, mu, f1, f2);
        const auto N = static_cast<Eigen::Index>(n);
        const SymTridiagonal& t = Q.op.matrix();
        const auto sc = Q.op.scaling();
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
        for (Eigen::Index i = 0; i < N; ++i) {
            for (Eigen::Index o : {Eigen::Index(0), N}) {
                M(o + i, o + i) = t.diag[i] - mu;
                if (i > 0) M(o + i, o + i - 1) = t.off[i - 1] * sc[i - 1] / sc[i];
                if (i + 1 < N) M(o + i, o + i + 1) = t.off[i] * sc[i + 1] / sc[i];
            }
            M(i, i) -= A.a;
            M(i, N + i) -= A.b;
            M(N + i, i) -= A.c;
            M(N + i, N + i) -= A.d;
        }
        Eigen::VectorXd rhs(2 * N);
        for (Eigen::Index i = 0; i < N; ++i) {
            rhs(i) = f1[i];
            rhs(N + i) = f2[i];
        }
        const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
        const std::vector<double> b1(x.data(), x.data() + N), b2(x.data() + N, x.data() + 2 * N);
        const double e1 = xdist(s.u1, b1, phi), e2 = xdist(s.u2, b2, phi);
        ok = e1 <= 1e-8 && e2 <= 1e-8;
        return fmt::format("X-distance {:.2e}, {:.2e}", e1, e2);
    });

    report(10, "CLI determinism and exit codes", [](bool& ok) {
        const fs::path configs = GSP_TEST_CONFIGS;
        const fs::path base = fs::temp_directory_path() / "gsp_acceptance";
        fs::remove_all(base);
        std::string files[2][2];
        int codes[2];
        for (int k = 0; k < 2; ++k) {
            RunOverrides ov;
            ov.output_dir = base / fmt::format("run{}", k);
            codes[k] = run_experiment(load_config(configs / "golden.json"), ov).exit_code;
            files[k][0] = slurp(*ov.output_dir / "sweep.csv");
            files[k][1] = slurp(*ov.output_dir / "spectrum.json");
        }
        auto code = [&](const char* name) {
            RunOverrides ov;
            ov.output_dir = base / "fail";
            try {
                return run_experiment(load_config(configs / name), ov).exit_code;
            } catch (const Error& e) {
                return exit_code_for(e.kind());
            }
        };
        const int c2 = code("fail_config.json"), c3 = code("fail_numerical.json"), c4 = code("fail_certificate.json");
        const bool same = files[0][0] == files[1][0] && files[0][1] == files[1][1] && !files[0][0].empty();
        ok = codes[0] == 0 && codes[1] == 0 && same && c2 == 2 && c3 == 3 && c4 == 4;
        return fmt::format("golden exit {} / {}, identical outputs {}; failure exits {}, {}, {}", codes[0], codes[1],
                           same, c2, c3, c4);
    });

    fmt::print("{} of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
