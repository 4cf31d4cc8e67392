#pragma once

#include "gsp/radial_grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gsp {

/// Nonlinearity f(x, u) registered through its groundstate-relative profile
/// g with f = phi * g, so that kappa phi <= f <= K phi reads kappa <= g <= K.
///
/// kappa = 0 encodes a problem without the lower bound; such a
/// nonlinearity can only be used below Lambda and never yields a positivity
/// certificate.
class Nonlinearity {
public:
    using Profile = std::function<double(double r, double u)>;

    Nonlinearity(std::string name, Profile g, double kappa, double K, bool decreasing_ratio);

    /// g = value (kappa = K = value)
    static Nonlinearity constant(double value);
    /// g = kappa + (K - kappa) / (1 + u^2)
    static Nonlinearity rational(double kappa, double K);
    /// g = kappa + (K - kappa) exp(-s |u|)
    static Nonlinearity exp_decay(double kappa, double K, double s);

    const std::string& name() const noexcept { return name_; }
    double kappa() const noexcept { return kappa_; }
    double K() const noexcept { return K_; }
    bool decreasing_ratio() const noexcept { return decreasing_ratio_; }
    bool has_lower_bound() const noexcept { return kappa_ > 0.0; }

    double profile(double r, double u) const { return g_(r, u); }

    /// f_i = phi_i g(r_i, u_i)
    std::vector<double> evaluate(const Grid& grid, std::span<const double> phi,
                                 std::span<const double> u) const;
    void evaluate_into(const Grid& grid, std::span<const double> phi, std::span<const double> u,
                       std::span<double> out) const;

private:
    std::string name_;
    Profile g_;
    double kappa_;
    double K_;
    bool decreasing_ratio_;
};

struct NonlinearityCheck {
    double min_profile = 0.0;
    double max_profile = 0.0;
    std::size_t nodes_sampled = 0;
    std::size_t values_sampled = 0;
};

/// Lattice spot check of kappa <= g <= K on (node subset) x (signed log-spaced
/// values up to u_extent), and of the strict decrease of u -> f(x,u)/|u| on
/// u > 0 when the flag is set. Throws HypothesisViolated.
NonlinearityCheck check_nonlinearity(const Nonlinearity& nl, const Grid& grid, double u_extent,
                                     std::size_t value_count = 64);

/// Finite-difference estimate of max_x |d f(x,u)/du| over u in [u_lo, u_hi].
double estimate_lipschitz(const Nonlinearity& nl, const Grid& grid, std::span<const double> phi,
                          double u_lo, double u_hi, std::size_t value_count = 256);

} // namespace gsp
