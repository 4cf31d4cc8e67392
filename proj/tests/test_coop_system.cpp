#include "gsp/coop_system.hpp"
#include "gsp/errors.hpp"

#include <doctest.h>
#include <Eigen/Dense>

#include <cmath>

using namespace gsp;

namespace {

struct Setup {
    RadialPotential pot = RadialPotential::power(1.0, 4.0, 0.0);
    Grid grid;
    SpectrumSummary spec;
    DiscreteOperator op;
    WindowEstimate win;

    Setup() : grid(build_grid(pot, 3, 20.0, 150.0)), spec(compute_spectrum(grid, pot)), op(assemble(grid, pot, 0)),
              win(estimate_c0_delta0(spec, op)) {}
};

const Setup& setup() {
    static const Setup s;
    return s;
}

double xdist(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& phi) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return x_norm(d, phi);
}

} // namespace

TEST_CASE("matrix algebra") {
    const CoopMatrix m = analyze_matrix(0, 1, 4, 0);
    CHECK(m.xi1 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m.xi2 == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(m.Y[0] == 1.0);
    CHECK(m.Y[1] == doctest::Approx(2.0).epsilon(1e-14));

    const CoopMatrix m2 = analyze_matrix(1, 2, 3, 2);
    CHECK(m2.disc == doctest::Approx(25.0));
    CHECK(m2.xi1 == doctest::Approx(4.0));
    CHECK(m2.xi2 == doctest::Approx(-1.0));
    CHECK(m2.Y[0] == doctest::Approx(2.0));
    CHECK(m2.Y[1] == doctest::Approx(3.0));

    const CoopMatrix sym = analyze_matrix(0.7, 1, 1, 0.7);
    CHECK(sym.xi1 == doctest::Approx(1.7));
    CHECK(sym.Y[0] == doctest::Approx(sym.Y[1]));

    CHECK_THROWS_AS(analyze_matrix(0, 0, 1, 0), Error);
    CHECK_THROWS_AS(analyze_matrix(0, 1, -1, 0), Error);
}

TEST_CASE("transformed data") {
    const CoopMatrix m = analyze_matrix(0, 1, 4, 0);
    const std::vector<double> phi = {0.5, 0.25, 0.125};
    const TransformedData t = transform_data(m, phi, phi, phi, 1.0, 2.0);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(t.g1[i] == doctest::Approx(0.75 * phi[i]));
    CHECK(t.kappa_prime == doctest::Approx(0.75));
    CHECK(t.K_prime == doctest::Approx(1.5));
    CHECK(t.g2_bound_ok);

    // F = Y phi lands on the first diagonal component only
    std::vector<double> f1(phi.size()), f2(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        f1[i] = m.Y[0] * phi[i];
        f2[i] = m.Y[1] * phi[i];
    }
    const TransformedData ty = transform_data(m, f1, f2, phi, 1.0, 2.0);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        CHECK(ty.g1[i] == doctest::Approx(phi[i]).epsilon(1e-14));
        CHECK(std::abs(ty.g2[i]) < 1e-15);
    }

    // kappa phi data gives exactly kappa' phi in the first component
    const CoopMatrix m2 = analyze_matrix(1, 2, 3, 2);
    std::vector<double> k(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) k[i] = 1.3 * phi[i];
    const TransformedData tk = transform_data(m2, k, k, phi, 1.3, 2.0);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(tk.g1[i] == doctest::Approx(tk.kappa_prime * phi[i]));
}

TEST_CASE("rectangles scale with the gap") {
    const CoopMatrix m = analyze_matrix(0, 1, 4, 0);
    const Rectangle a = make_rectangle(m, 1.0, 2.0, 5.0, 4.9);
    const Rectangle b = make_rectangle(m, 1.0, 2.0, 5.0, 4.95);
    for (int i = 0; i < 2; ++i) {
        CHECK(b.lower_coef[i] == doctest::Approx(2.0 * a.lower_coef[i]));
        CHECK(b.upper_coef[i] == doctest::Approx(2.0 * a.upper_coef[i]));
    }
    CHECK(a.lower_coef[0] == doctest::Approx(1.0 * 1.0 / (2.0 * 0.1)));
    CHECK(a.upper_coef[1] == doctest::Approx(2.0 * 2.0 / (1.0 * 0.1)));
    const Rectangle c = make_rectangle(m, 1.0, 2.0, 5.0, 5.1);
    CHECK(c.kind == Branch::AMP);
    CHECK(c.upper_coef[0] < 0.0);
}

TEST_CASE("principal eigen-identity of the system") {
    const Setup& s = setup();
    const CoopMatrix A = analyze_matrix(0, 1, 4, 0);
    const auto& phi = s.spec.phi;
    const double Ls = s.spec.Lambda - A.xi1;
    // (L - A) Y phi = Lambda* Y phi
    const auto lphi = s.op.apply(phi);
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r1 = A.Y[0] * lphi[i] - (A.a * A.Y[0] + A.b * A.Y[1]) * phi[i] - Ls * A.Y[0] * phi[i];
        const double r2 = A.Y[1] * lphi[i] - (A.c * A.Y[0] + A.d * A.Y[1]) * phi[i] - Ls * A.Y[1] * phi[i];
        worst = std::max({worst, std::abs(r1) / phi[i], std::abs(r2) / phi[i]});
    }
    CHECK(worst < 1e-6 * s.op.matrix().norm_inf());
}

TEST_CASE("diagonalized solve against a dense block solve") {
    const Setup& s = setup();
    const CoopMatrix A = analyze_matrix(1, 2, 3, 2);
    const auto& phi = s.spec.phi;
    const double mu = s.spec.Lambda - A.xi1 - 0.07;
    const std::size_t n = phi.size();
    std::vector<double> f1(n), f2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.grid.radii()[i];
        f1[i] = phi[i] * (1.0 + 0.3 * std::cos(r));
        f2[i] = phi[i] * (2.0 - 0.5 * r / s.grid.r_max());
    }
    const SystemLinearSolution sol = system_linear_solve(s.op, A, mu, f1, f2);

    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    const SymTridiagonal& t = s.op.matrix();
    const auto sc = s.op.scaling();
    for (Eigen::Index i = 0; i < N; ++i) {
        for (int blk = 0; blk < 2; ++blk) {
            const Eigen::Index o = blk * N;
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
    std::vector<double> b1(n), b2(n);
    for (std::size_t i = 0; i < n; ++i) {
        b1[i] = x(static_cast<Eigen::Index>(i));
        b2[i] = x(N + static_cast<Eigen::Index>(i));
    }
    CHECK(xdist(sol.u1, b1, phi) <= 1e-8);
    CHECK(xdist(sol.u2, b2, phi) <= 1e-8);
}

TEST_CASE("system branches") {
    const Setup& s = setup();
    const CoopMatrix A = analyze_matrix(0, 1, 4, 0);
    const Nonlinearity nl = Nonlinearity::rational(1.0, 2.0);
    const double Ls = s.spec.Lambda - A.xi1;
    for (double off : {-0.1, -0.05, 0.05, 0.1}) {
        const SystemReport r = solve_system({s.op, s.spec, s.win, A, nl, nl, Ls + off});
        CHECK(r.certified());
        CHECK(r.in_rectangle);
        CHECK(r.rectangle_violations == 0);
        CHECK(r.v1_lower_ok);
        CHECK(r.two_start_gap < 1e-7);
        CHECK(r.coupled.cross_raw <= 1e-8);
        CHECK(r.coupled.cross_raw == doctest::Approx(r.coupled.cross_sqrt).epsilon(1e-6).scale(1e-12));
        CHECK((r.branch == Branch::MP) == (off < 0.0));
    }
    CHECK_THROWS_AS(solve_system({s.op, s.spec, s.win, A, nl, nl, Ls - 0.9}), Error);
}

TEST_CASE("coupled uniqueness on synthetic pairs") {
    const Setup& s = setup();
    const CoopMatrix A = analyze_matrix(0, 1, 4, 0);
    const Nonlinearity nl = Nonlinearity::rational(1.0, 2.0);
    const auto& phi = s.spec.phi;
    const std::size_t n = phi.size();
    std::vector<double> u1(n), u2(n), v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        u1[i] = A.Y[0] * phi[i];
        u2[i] = A.Y[1] * phi[i];
        v1[i] = 2.0 * u1[i];
        v2[i] = 2.0 * u2[i];
    }
    const CoupledUniqueness same = coupled_uniqueness_check(s.op, A, phi, nl, nl, u1, u2, u1, u2);
    CHECK(same.T1 == 0.0);
    CHECK(same.cross_raw == 0.0);
    const CoupledUniqueness prop = coupled_uniqueness_check(s.op, A, phi, nl, nl, u1, u2, v1, v2);
    CHECK(std::abs(prop.T1) < 1e-9);
    CHECK(std::abs(prop.cross_raw) < 1e-9);

    // smooth positive perturbations: cross term is nonpositive and both forms agree
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.grid.radii()[i];
        v1[i] = u1[i] * (1.0 + 0.2 * std::sin(r));
        v2[i] = u2[i] * (1.0 + 0.1 * r * r);
    }
    const CoupledUniqueness pert = coupled_uniqueness_check(s.op, A, phi, nl, nl, u1, u2, v1, v2);
    CHECK(pert.cross_raw < 0.0);
    CHECK(pert.cross_raw == doctest::Approx(pert.cross_sqrt).epsilon(1e-10));
    CHECK(pert.T1 >= 0.0);

    v2[3] = -v2[3];
    CHECK_THROWS_AS(coupled_uniqueness_check(s.op, A, phi, nl, nl, u1, u2, v1, v2), Error);
}
