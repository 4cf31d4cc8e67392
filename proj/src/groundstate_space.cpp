#include "gsp/groundstate_space.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace gsp {

double x_norm(std::span<const double> v, std::span<const double> phi) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v[i]) / phi[i]);
    return best;
}

RatioRange ratio_range(std::span<const double> v, std::span<const double> phi) {
    RatioRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = v[i] / phi[i];
        out.min = std::min(out.min, r);
        out.max = std::max(out.max, r);
    }
    return out;
}

GroundstateVector decompose(const Grid& grid, std::span<const double> v, std::span<const double> phi) {
    if (v.size() != grid.size() || phi.size() != grid.size()) {
        throw Error(ErrorKind::InvalidArgument, "grid function size mismatch");
    }
    GroundstateVector g;
    g.values.assign(v.begin(), v.end());
    g.c1 = grid.inner(v, phi);
    g.perp.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) g.perp[i] = v[i] - g.c1 * phi[i];
    g.x_norm = x_norm(v, phi);
    return g;
}

double weighted_resolvent_norm(const DiscreteOperator& op, std::span<const double> phi, double mu) {
    const Resolvent res(op, mu);
    const auto w = op.grid().weights();
    const std::size_t n = op.size();
    std::vector<double> row_sums(n, 0.0);
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        // Pi (phi_j e_j)
        const double c = w[j] * phi[j] * phi[j];
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -c * phi[i];
        rhs[j] += phi[j];
        const std::vector<double> x = res.apply(rhs);
        // the resolvent preserves phi-perp, so x needs no second projection
        for (std::size_t i = 0; i < n; ++i) row_sums[i] += std::abs(x[i] / phi[i]);
    }
    return *std::max_element(row_sums.begin(), row_sums.end());
}

WindowEstimate estimate_c0_delta0(const SpectrumSummary& spec, const DiscreteOperator& op, double margin) {
    if (!(margin > 0.0 && margin < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "margin must lie in (0, 1)");
    }
    if (op.sector() != 0) throw Error(ErrorKind::InvalidArgument, "window estimate needs the l = 0 operator");

    WindowEstimate est;
    est.Lambda = spec.Lambda;
    est.lambda2 = spec.lambda2;
    est.delta0 = margin * (spec.lambda2 - spec.Lambda);
    for (int k = 1; k <= 4; ++k) {
        est.mu_samples.push_back(spec.Lambda - est.delta0 * k / 4.0);
        est.mu_samples.push_back(spec.Lambda + est.delta0 * k / 4.0);
    }

    std::vector<std::future<double>> jobs;
    for (double mu : est.mu_samples) {
        jobs.push_back(std::async(std::launch::async, [&op, &spec, mu] {
            return weighted_resolvent_norm(op, spec.phi, mu);
        }));
    }
    for (auto& job : jobs) est.sample_norms.push_back(job.get());
    est.c0 = *std::max_element(est.sample_norms.begin(), est.sample_norms.end());

    if (spec.radial_eigs.size() >= 2) {
        for (double mu : est.mu_samples) {
            est.c0_floor = std::max(est.c0_floor, 1.0 / std::abs(spec.radial_eigs[1] - mu));
        }
    }
    return est;
}

double probe_resolvent_bound(const DiscreteOperator& op, std::span<const double> phi, double mu,
                             std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const Resolvent res(op, mu);
    const Grid& grid = op.grid();
    const std::size_t n = op.size();
    double worst = 0.0;
    std::vector<double> f(n);
    for (int k = 0; k < count; ++k) {
        for (std::size_t i = 0; i < n; ++i) f[i] = dist(rng) * phi[i];
        const double c1 = grid.inner(f, phi);
        for (std::size_t i = 0; i < n; ++i) f[i] -= c1 * phi[i];
        const double fx = x_norm(f, phi);
        if (fx == 0.0) continue;
        const std::vector<double> u = res.apply(f);
        worst = std::max(worst, x_norm(u, phi) / fx);
    }
    return worst;
}

} // namespace gsp
