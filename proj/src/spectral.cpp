#include "gsp/spectral.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

namespace gsp {

DiscreteOperator::DiscreteOperator(Grid grid, int sector, SymTridiagonal matrix,
                                   std::vector<double> scaling, std::vector<double> potential,
                                   double centrifugal)
    : grid_(std::move(grid)),
      sector_(sector),
      matrix_(std::move(matrix)),
      scaling_(std::move(scaling)),
      potential_(std::move(potential)),
      centrifugal_(centrifugal) {}

std::vector<double> DiscreteOperator::to_symmetric(std::span<const double> u) const {
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = scaling_[i] * u[i];
    return w;
}

std::vector<double> DiscreteOperator::from_symmetric(std::span<const double> w) const {
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] / scaling_[i];
    return u;
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u) const {
    return from_symmetric(matrix_.apply(to_symmetric(u)));
}

std::vector<double> DiscreteOperator::apply_laplacian(std::span<const double> u) const {
    std::vector<double> out = apply(u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= potential_[i] * u[i];
    return out;
}

double DiscreteOperator::v_norm_squared(std::span<const double> u) const {
    // w^T T w already carries the gradient, centrifugal and q parts
    const std::vector<double> w = to_symmetric(u);
    const std::vector<double> tw = matrix_.apply(w);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * tw[i];
    return grid_.sphere_area() * grid_.h() * s;
}

DiscreteOperator assemble(const Grid& grid, const RadialPotential& pot, int sector) {
    if (sector < 0) throw Error(ErrorKind::InvalidArgument, "sector must be >= 0");
    const int dim = grid.space_dim();
    if (dim == 1 && sector > 1) {
        throw Error(ErrorKind::InvalidArgument, "N = 1 has only the even (0) and odd (1) sectors");
    }
    const std::size_t n = grid.size();
    const double h = grid.h();
    const double inv_h2 = 1.0 / (h * h);
    const auto radii = grid.radii();

    double centrifugal = 0.0;
    if (dim >= 2) {
        centrifugal = 0.25 * (dim - 1) * (dim - 3) + static_cast<double>(sector) * (sector + dim - 2);
    }

    SymTridiagonal t;
    t.diag.resize(n);
    t.off.assign(n - 1, -inv_h2);
    std::vector<double> q(n), scaling(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = radii[i];
        q[i] = pot(r);
        t.diag[i] = 2.0 * inv_h2 + centrifugal / (r * r) + q[i];
        scaling[i] = std::pow(r, 0.5 * (dim - 1));
    }
    if (!grid.cell_centered()) {
        // centrifugal term taken as the discrete second difference of r^p over r^p,
        // so the regular profile r^p is exact at every node. Tends to p(p-1)/r^2,
        // but stays accurate near the origin where -1/(4r^2) (N = 2) is singular
        const double p = static_cast<double>(sector) + 0.5 * (dim - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = static_cast<double>(i + 1);
            const double ratio = std::pow((k + 1.0) / k, p) - 2.0 + (i == 0 ? 0.0 : std::pow((k - 1.0) / k, p));
            t.diag[i] = (2.0 + ratio) * inv_h2 + q[i];
        }
    } else {
        // reflection across the origin: ghost = +w_1 (even) or -w_1 (odd)
        t.diag[0] += sector == 0 ? -inv_h2 : inv_h2;
    }
    return DiscreteOperator(grid, sector, std::move(t), std::move(scaling), std::move(q), centrifugal);
}

Resolvent::Resolvent(const DiscreteOperator& op, double mu, double exclusion)
    : mu_(mu),
      scaling_(op.scaling().begin(), op.scaling().end()),
      lu_(op.matrix(), mu) {
    const std::size_t below = sturm_count(op.matrix(), mu - exclusion);
    const std::size_t above = sturm_count(op.matrix(), mu + exclusion);
    if (below != above || lu_.singular()) {
        throw Error(ErrorKind::SingularResolvent,
                    fmt::format("mu = {:.12g} is within {:.1e} of an eigenvalue of sector {}", mu,
                                exclusion, op.sector()));
    }
}

std::vector<double> Resolvent::apply(std::span<const double> f) const {
    std::vector<double> x(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) x[i] = scaling_[i] * f[i];
    lu_.solve_in_place(x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] /= scaling_[i];
    return x;
}

std::vector<double> solve_shifted(const DiscreteOperator& op, double mu, std::span<const double> f) {
    const Resolvent res(op, mu);
    std::vector<double> u = res.apply(f);

    const std::vector<double> lu = op.apply(u);
    double rnorm = 0.0, fnorm = 0.0;
    const auto w = op.grid().weights();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = lu[i] - mu * u[i] - f[i];
        rnorm += w[i] * r * r;
        fnorm += w[i] * f[i] * f[i];
    }
    rnorm = std::sqrt(rnorm);
    fnorm = std::sqrt(fnorm);
    // relative to the scale of the operator times the solution
    double unorm = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) unorm += w[i] * u[i] * u[i];
    unorm = std::sqrt(unorm);
    const double scale = fnorm + (op.matrix().norm_inf() + std::abs(mu)) * unorm;
    if (scale > 0.0 && rnorm > 1e-10 * scale) {
        throw Error(ErrorKind::VerificationFailed,
                    fmt::format("shifted solve residual {:.3e} exceeds tolerance", rnorm / scale));
    }
    return u;
}

namespace {

RadialMode to_mode(const DiscreteOperator& op, Eigenpair&& pair) {
    RadialMode mode;
    mode.value = pair.value;
    mode.residual = pair.residual;
    mode.u = op.from_symmetric(pair.vector);
    const double norm = op.grid().l2_norm(mode.u);
    const double sign = mode.u.front() < 0.0 ? -1.0 : 1.0;
    for (double& v : mode.u) v *= sign / norm;
    return mode;
}

} // namespace

RadialMode principal_eigenpair(const DiscreteOperator& op, int max_iterations) {
    if (op.sector() != 0) {
        throw Error(ErrorKind::InvalidArgument, "principal eigenpair requires the l = 0 sector");
    }
    RadialMode mode = to_mode(op, tridiagonal_eigenpair(op.matrix(), 0, max_iterations));

    double diag_max = 0.0;
    for (double d : op.matrix().diag) diag_max = std::max(diag_max, std::abs(d));
    if (!(mode.residual <= 1e-10 * diag_max)) {
        throw Error(ErrorKind::ConvergenceFailure,
                    fmt::format("principal eigenpair residual {:.3e}", mode.residual));
    }
    for (double v : mode.u) {
        if (!(v > 0.0)) {
            throw Error(ErrorKind::ConvergenceFailure, "principal eigenvector is not of one sign");
        }
    }
    return mode;
}

std::vector<RadialMode> sector_modes(const DiscreteOperator& op, std::size_t count, int max_iterations) {
    std::vector<RadialMode> modes;
    modes.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        modes.push_back(to_mode(op, tridiagonal_eigenpair(op.matrix(), k, max_iterations)));
    }
    return modes;
}

SecondEigenvalue second_eigenvalue(const Grid& grid, const RadialPotential& pot, int max_sector) {
    if (max_sector < 1) throw Error(ErrorKind::InvalidArgument, "max_sector must be >= 1");
    const int top = grid.space_dim() == 1 ? 1 : max_sector;

    std::vector<std::future<double>> jobs;
    for (int l = 1; l <= top; ++l) {
        jobs.push_back(std::async(std::launch::async, [&grid, &pot, l] {
            return tridiagonal_eigenvalue(assemble(grid, pot, l).matrix(), 0);
        }));
    }
    SecondEigenvalue out;
    out.value = tridiagonal_eigenvalue(assemble(grid, pot, 0).matrix(), 1);
    out.sector = 0;
    for (int l = 1; l <= top; ++l) {
        const double v = jobs[static_cast<std::size_t>(l - 1)].get();
        out.sector_minima.push_back(v);
        if (v < out.value) { // strict: ties keep the lower sector
            out.value = v;
            out.sector = l;
        }
    }
    if (grid.space_dim() >= 2 && out.sector == max_sector) {
        throw Error(ErrorKind::SectorBudget,
                    fmt::format("lambda_2 attained at the last searched sector {}; raise max_sector",
                                max_sector));
    }
    return out;
}

SpectrumSummary compute_spectrum(const Grid& grid, const RadialPotential& pot, int max_sector,
                                 std::size_t radial_count) {
    const DiscreteOperator op = assemble(grid, pot, 0);
    SpectrumSummary s;
    const RadialMode ground = principal_eigenpair(op);
    s.Lambda = ground.value;
    s.phi = ground.u;
    s.eigen_residual = ground.residual;

    auto modes = sector_modes(op, std::max<std::size_t>(radial_count, 2));
    for (auto& m : modes) {
        s.radial_eigs.push_back(m.value);
        s.radial_u.push_back(std::move(m.u));
    }
    // keep the principal mode identical to the certified one
    s.radial_eigs[0] = s.Lambda;
    s.radial_u[0] = s.phi;

    const SecondEigenvalue second = second_eigenvalue(grid, pot, max_sector);
    s.lambda2 = second.value;
    s.lambda2_sector = second.sector;
    s.sector_minima = second.sector_minima;
    s.max_sector = grid.space_dim() == 1 ? 1 : max_sector;

    if (!(s.Lambda > 0.0 && s.Lambda < s.lambda2)) {
        throw Error(ErrorKind::ConvergenceFailure,
                    fmt::format("spectrum ordering violated: Lambda = {}, lambda2 = {}", s.Lambda, s.lambda2));
    }
    return s;
}

} // namespace gsp
