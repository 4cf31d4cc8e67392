#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gsp {

/// Radial potential q(r) > 0 together with the radius R0 beyond which it is
/// increasing. Only evaluator access is assumed.
class RadialPotential {
public:
    using Evaluator = std::function<double(double)>;

    RadialPotential(std::string name, Evaluator q, double r0);

    /// c + r^s
    static RadialPotential power(double c, double s, double r0 = 1.0);
    /// e^r
    static RadialPotential exponential(double r0 = 0.0);
    /// Piecewise-linear interpolation of (r, q) samples; linear extrapolation
    /// past the last sample using the final segment.
    static RadialPotential tabulated(std::vector<double> r, std::vector<double> q, double r0);
    /// Two-column CSV with header `r,q` and strictly increasing r.
    static RadialPotential from_csv(const std::filesystem::path& path, double r0);

    double operator()(double r) const { return q_(r); }
    double r0() const noexcept { return r0_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
    Evaluator q_;
    double r0_;
};

struct ClassPOptions {
    double decay_factor = 0.9;  // far tail segment must be <= factor * near segment
    std::size_t samples = 4096; // monotonicity/positivity sample count
    std::size_t quadrature_intervals = 4096;
};

struct ClassPReport {
    bool pass = false;
    bool monotone = false;
    double r_test = 0.0;
    double tol = 0.0;
    double tail_near = 0.0; // integral of q^{-1/2} over [r_test/4, r_test/2]
    double tail_far = 0.0;  // integral of q^{-1/2} over [r_test/2, r_test]
    double decay_ratio = 0.0;
};

/// Certifies class-P membership by sampling: positivity on [0, r_test],
/// monotonicity on [R0, r_test], and geometric decay of the dyadic tail
/// segments of q^{-1/2}.
/// Throws NonPositivePotential / NotIncreasing.
ClassPReport validate_class_P(const RadialPotential& pot, double r_test, double tol,
                              const ClassPOptions& options = {});

/// Area of the unit sphere S^{N-1} in R^N; equals 2 for N = 1.
double unit_sphere_area(int space_dim);

/// Uniform radial grid on (0, r_max) with n nodes and spacing h = r_max/(n+1).
///
/// For N >= 2 the nodes sit at r_i = i h with Dirichlet ghosts at 0 and r_max.
/// For N = 1 the nodes are cell-centred, r_i = (i - 1/2) h, so that the even
/// and odd parity sectors reflect exactly across the origin.
/// Quadrature weights are omega_{N-1} r_i^{N-1} h.
class Grid {
public:
    Grid(int space_dim, double r_max, std::size_t n);

    int space_dim() const noexcept { return space_dim_; }
    double r_max() const noexcept { return r_max_; }
    std::size_t size() const noexcept { return radii_.size(); }
    double h() const noexcept { return h_; }
    double sphere_area() const noexcept { return sphere_area_; }
    bool cell_centered() const noexcept { return space_dim_ == 1; }

    std::span<const double> radii() const noexcept { return radii_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double integrate(std::span<const double> f) const;
    double inner(std::span<const double> a, std::span<const double> b) const;
    double l2_norm(std::span<const double> f) const;

private:
    int space_dim_;
    double r_max_;
    double h_;
    double sphere_area_;
    std::vector<double> radii_;
    std::vector<double> weights_;
};

struct GridOptions {
    double truncation_factor = 4.0;
    double hard_cap = 1.0e4;   // largest radius searched for r_max
    double search_step = 1e-2; // coarse scan step before bisection
};

/// r_max is the smallest radius with q(r_max) >= truncation_factor * spectral_scale;
/// n = ceil(points_per_unit * r_max). Throws UnboundedSearch.
Grid build_grid(const RadialPotential& pot, int space_dim, double spectral_scale,
                double points_per_unit, const GridOptions& options = {});

/// Truncation adequacy: q(r_max) >= factor * spectral_value.
bool truncation_adequate(const Grid& grid, const RadialPotential& pot, double spectral_value,
                         double factor = 4.0);

} // namespace gsp
