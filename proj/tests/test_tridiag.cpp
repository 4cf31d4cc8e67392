#include "gsp/errors.hpp"
#include "gsp/tridiag.hpp"

#include <doctest.h>
#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace gsp;

namespace {

SymTridiagonal random_tridiagonal(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    SymTridiagonal t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (auto& x : t.diag) x = d(rng);
    for (auto& x : t.off) x = d(rng);
    return t;
}

Eigen::MatrixXd dense(const SymTridiagonal& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = t.diag[i];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = t.off[i];
    }
    return m;
}

} // namespace

TEST_CASE("eigenvalues match a dense symmetric solve") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const SymTridiagonal t = random_tridiagonal(60, seed);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
        for (std::size_t k : {0u, 1u, 7u, 59u}) {
            const Eigenpair ep = tridiagonal_eigenpair(t, k);
            CHECK(ep.value == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-11));
            // same vector up to sign
            const double dot = std::abs(Eigen::Map<const Eigen::VectorXd>(ep.vector.data(), 60).dot(es.eigenvectors().col(k)));
            CHECK(dot == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(ep.residual < 1e-10 * t.norm_inf());
        }
    }
}

TEST_CASE("sturm count brackets each eigenvalue") {
    const SymTridiagonal t = random_tridiagonal(40, 9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
    for (Eigen::Index k = 0; k < 40; ++k) {
        CHECK(sturm_count(t, es.eigenvalues()(k) - 1e-9) == static_cast<std::size_t>(k));
        CHECK(sturm_count(t, es.eigenvalues()(k) + 1e-9) == static_cast<std::size_t>(k + 1));
    }
}

TEST_CASE("pivoted LU solves indefinite shifts") {
    const SymTridiagonal t = random_tridiagonal(50, 4);
    const double shift = 0.123;
    const TridiagonalLU lu(t, shift);
    std::vector<double> b(50);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.3 * static_cast<double>(i));
    const std::vector<double> x = lu.solve(b);
    Eigen::MatrixXd m = dense(t) - shift * Eigen::MatrixXd::Identity(50, 50);
    const Eigen::VectorXd ref = m.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 50));
    for (std::size_t i = 0; i < 50; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-9));
}

TEST_CASE("exact singular shift is reported") {
    SymTridiagonal t;
    t.diag = {1.0, 1.0};
    t.off = {1.0};
    // eigenvalues 0 and 2
    const TridiagonalLU lu(t, 2.0);
    CHECK(lu.singular());
    std::vector<double> b = {1.0, 1.0};
    CHECK_THROWS_AS(lu.solve_in_place(b), Error);
}
