#include "gsp/nonlinearity.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace gsp {

Nonlinearity::Nonlinearity(std::string name, Profile g, double kappa, double K, bool decreasing_ratio)
    : name_(std::move(name)), g_(std::move(g)), kappa_(kappa), K_(K), decreasing_ratio_(decreasing_ratio) {
    if (!g_) throw Error(ErrorKind::InvalidArgument, "nonlinearity profile is empty");
    if (!(kappa_ >= 0.0 && K_ > 0.0 && kappa_ <= K_)) {
        throw Error(ErrorKind::HypothesisViolated,
                    fmt::format("bounds need 0 <= kappa <= K with K > 0 (kappa = {}, K = {})", kappa_, K_));
    }
}

Nonlinearity Nonlinearity::constant(double value) {
    return Nonlinearity(fmt::format("constant(g={})", value), [value](double, double) { return value; },
                        value, value, true);
}

Nonlinearity Nonlinearity::rational(double kappa, double K) {
    return Nonlinearity(fmt::format("rational(kappa={}, K={})", kappa, K),
                        [kappa, K](double, double u) { return kappa + (K - kappa) / (1.0 + u * u); },
                        kappa, K, true);
}

Nonlinearity Nonlinearity::exp_decay(double kappa, double K, double s) {
    if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "exp_decay needs s >= 0");
    return Nonlinearity(fmt::format("exp_decay(kappa={}, K={}, s={})", kappa, K, s),
                        [kappa, K, s](double, double u) { return kappa + (K - kappa) * std::exp(-s * std::abs(u)); },
                        kappa, K, true);
}

void Nonlinearity::evaluate_into(const Grid& grid, std::span<const double> phi, std::span<const double> u,
                                 std::span<double> out) const {
    const auto radii = grid.radii();
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = phi[i] * g_(radii[i], u[i]);
}

std::vector<double> Nonlinearity::evaluate(const Grid& grid, std::span<const double> phi,
                                           std::span<const double> u) const {
    std::vector<double> out(u.size());
    evaluate_into(grid, phi, u, out);
    return out;
}

namespace {

std::vector<double> positive_lattice(double extent, std::size_t count) {
    // log-spaced on [1e-6, extent]
    std::vector<double> v(count);
    const double lo = std::log(1e-6);
    const double hi = std::log(std::max(extent, 1e-5));
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    return v;
}

std::vector<std::size_t> node_subset(const Grid& grid, std::size_t max_nodes = 64) {
    const std::size_t n = grid.size();
    std::vector<std::size_t> idx;
    const std::size_t stride = std::max<std::size_t>(1, n / max_nodes);
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

} // namespace

NonlinearityCheck check_nonlinearity(const Nonlinearity& nl, const Grid& grid, double u_extent,
                                     std::size_t value_count) {
    const std::vector<double> pos = positive_lattice(u_extent, std::max<std::size_t>(value_count, 2));
    const auto radii = grid.radii();
    const double slack = 1e-12 * std::max(1.0, nl.K());

    NonlinearityCheck rep;
    rep.min_profile = nl.profile(radii[0], 0.0);
    rep.max_profile = rep.min_profile;
    const auto nodes = node_subset(grid);
    rep.nodes_sampled = nodes.size();
    rep.values_sampled = 2 * pos.size() + 1;

    for (std::size_t i : nodes) {
        const double r = radii[i];
        auto probe = [&](double u) {
            const double g = nl.profile(r, u);
            rep.min_profile = std::min(rep.min_profile, g);
            rep.max_profile = std::max(rep.max_profile, g);
            if (!(g >= nl.kappa() - slack && g <= nl.K() + slack)) {
                throw Error(ErrorKind::HypothesisViolated,
                            fmt::format("{}: g(r={}, u={}) = {} outside [{}, {}]", nl.name(), r, u, g,
                                        nl.kappa(), nl.K()));
            }
            return g;
        };
        probe(0.0);
        double prev_ratio = 0.0;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            probe(-pos[k]);
            const double ratio = probe(pos[k]) / pos[k];
            if (nl.decreasing_ratio() && k > 0 && !(ratio < prev_ratio)) {
                throw Error(ErrorKind::HypothesisViolated,
                            fmt::format("{}: f/|u| not strictly decreasing near u = {} at r = {}", nl.name(),
                                        pos[k], r));
            }
            prev_ratio = ratio;
        }
    }
    return rep;
}

double estimate_lipschitz(const Nonlinearity& nl, const Grid& grid, std::span<const double> phi, double u_lo,
                          double u_hi, std::size_t value_count) {
    if (u_hi < u_lo) std::swap(u_lo, u_hi);
    const auto radii = grid.radii();
    const std::size_t m = std::max<std::size_t>(value_count, 2);
    const double du = (u_hi - u_lo) / static_cast<double>(m - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double slope = 0.0;
        double prev = nl.profile(radii[i], u_lo);
        for (std::size_t k = 1; k < m; ++k) {
            const double u = u_lo + du * static_cast<double>(k);
            const double g = nl.profile(radii[i], u);
            if (du > 0.0) slope = std::max(slope, std::abs(g - prev) / du);
            prev = g;
        }
        best = std::max(best, phi[i] * slope);
    }
    return best;
}

} // namespace gsp
