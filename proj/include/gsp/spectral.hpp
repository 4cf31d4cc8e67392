#pragma once

#include "gsp/radial_grid.hpp"
#include "gsp/tridiag.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gsp {

/// Finite-difference radial reduction of L = -Delta + q in angular sector l.
///
/// The matrix acts on the symmetrized unknown w = r^{(N-1)/2} u:
///   -w'' + [ (N-1)(N-3)/4 + l(l+N-2) ] / r^2 w + q w.
/// In u-space the operator is S^{-1} T S with S = diag(r^{(N-1)/2}), which is
/// self-adjoint for the grid quadrature inner product.
///
/// For N = 1 the sector is the parity: 0 even (Neumann at the origin),
/// 1 odd (Dirichlet at the origin).
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, int sector, SymTridiagonal matrix, std::vector<double> scaling,
                     std::vector<double> potential, double centrifugal);

    const Grid& grid() const noexcept { return grid_; }
    int sector() const noexcept { return sector_; }
    const SymTridiagonal& matrix() const noexcept { return matrix_; }
    std::span<const double> scaling() const noexcept { return scaling_; }
    std::span<const double> potential() const noexcept { return potential_; }
    double centrifugal() const noexcept { return centrifugal_; }
    std::size_t size() const noexcept { return matrix_.size(); }

    /// L_h u
    std::vector<double> apply(std::span<const double> u) const;
    /// -Delta_h u (same stencil with the potential removed)
    std::vector<double> apply_laplacian(std::span<const double> u) const;
    /// Discrete V-norm squared: integral of |grad u|^2 + (centrifugal + q) u^2.
    double v_norm_squared(std::span<const double> u) const;

    std::vector<double> to_symmetric(std::span<const double> u) const;
    std::vector<double> from_symmetric(std::span<const double> w) const;

private:
    Grid grid_;
    int sector_;
    SymTridiagonal matrix_;
    std::vector<double> scaling_;
    std::vector<double> potential_;
    double centrifugal_;
};

DiscreteOperator assemble(const Grid& grid, const RadialPotential& pot, int sector);

/// Factored (L_h - mu)^{-1}. Construction throws SingularResolvent when mu is
/// within `exclusion` of an eigenvalue of the sector.
class Resolvent {
public:
    static constexpr double default_exclusion = 1e-8;

    Resolvent(const DiscreteOperator& op, double mu, double exclusion = default_exclusion);

    double mu() const noexcept { return mu_; }
    std::vector<double> apply(std::span<const double> f) const;

private:
    double mu_;
    std::vector<double> scaling_;
    TridiagonalLU lu_;
};

/// (L_h - mu)^{-1} f with a residual check.
std::vector<double> solve_shifted(const DiscreteOperator& op, double mu, std::span<const double> f);

struct RadialMode {
    double value = 0.0;
    std::vector<double> u; // quadrature-normalized, positive at the first node
    double residual = 0.0; // ||T w - value w||_2 for the unit symmetric vector
};

/// Smallest eigenpair of the l = 0 operator; phi > 0, ||phi|| = 1.
RadialMode principal_eigenpair(const DiscreteOperator& op, int max_iterations = 500);

/// First `count` eigenpairs of a single sector.
std::vector<RadialMode> sector_modes(const DiscreteOperator& op, std::size_t count,
                                     int max_iterations = 500);

struct SecondEigenvalue {
    double value = 0.0;
    int sector = 0;
    std::vector<double> sector_minima; // lowest eigenvalue of sectors 1..max_sector
};

/// lambda_2 = min{ second eigenvalue of sector 0, first eigenvalue of sectors
/// 1..max_sector }. Throws SectorBudget if max_sector attains the minimum
/// (N >= 2 only; for N = 1 the two parity sectors exhaust the spectrum).
SecondEigenvalue second_eigenvalue(const Grid& grid, const RadialPotential& pot, int max_sector = 8);

struct SpectrumSummary {
    double Lambda = 0.0;
    std::vector<double> phi;
    double lambda2 = 0.0;
    int lambda2_sector = 0;
    std::vector<double> radial_eigs;            // first few of sector 0
    std::vector<std::vector<double>> radial_u;  // matching eigenfunctions
    std::vector<double> sector_minima;
    int max_sector = 0;
    double eigen_residual = 0.0;
};

/// Principal eigenpair, lambda_2 and a few radial modes.
SpectrumSummary compute_spectrum(const Grid& grid, const RadialPotential& pot, int max_sector = 8,
                                 std::size_t radial_count = 3);

} // namespace gsp
