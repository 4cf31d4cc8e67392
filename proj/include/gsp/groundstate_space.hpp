#pragma once

#include "gsp/radial_grid.hpp"
#include "gsp/spectral.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gsp {

/// Grid function split along the groundstate: values = c1 * phi + perp with
/// perp quadrature-orthogonal to phi.
struct GroundstateVector {
    std::vector<double> values;
    double x_norm = 0.0;
    double c1 = 0.0;
    std::vector<double> perp;
};

/// sup_i |v_i| / phi_i over the grid nodes (Dirichlet ghosts are not nodes).
double x_norm(std::span<const double> v, std::span<const double> phi);

/// min_i v_i / phi_i and max_i v_i / phi_i
struct RatioRange {
    double min = 0.0;
    double max = 0.0;
};
RatioRange ratio_range(std::span<const double> v, std::span<const double> phi);

GroundstateVector decompose(const Grid& grid, std::span<const double> v, std::span<const double> phi);

/// Sampled resolvent bound on phi-perp in the X-norm.
struct WindowEstimate {
    double Lambda = 0.0;
    double lambda2 = 0.0;
    double delta0 = 0.0;
    double c0 = 0.0;
    double c0_floor = 0.0;           // max_mu 1/|lambda2_radial - mu|, a lower bound for c0
    std::vector<double> mu_samples;  // Lambda -/+ delta0 k/4, k = 1..4
    std::vector<double> sample_norms;
};

/// || D_phi^{-1} Pi (L - mu)^{-1} Pi D_phi ||_inf for a single mu.
double weighted_resolvent_norm(const DiscreteOperator& op, std::span<const double> phi, double mu);

/// delta0 = margin (lambda2 - Lambda); c0 = max of weighted_resolvent_norm over
/// the eight mu samples. Throws SingularResolvent if a sample hits an eigenvalue.
WindowEstimate estimate_c0_delta0(const SpectrumSummary& spec, const DiscreteOperator& op,
                                  double margin = 0.5);

/// Largest ||u||_X / ||f||_X over `count` random f in phi-perp (fixed seed).
double probe_resolvent_bound(const DiscreteOperator& op, std::span<const double> phi, double mu,
                             std::uint64_t seed, int count = 16);

} // namespace gsp
