#include "gsp/radial_grid.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace gsp {

RadialPotential::RadialPotential(std::string name, Evaluator q, double r0)
    : name_(std::move(name)), q_(std::move(q)), r0_(r0) {
    if (!q_) throw Error(ErrorKind::InvalidArgument, "potential evaluator is empty");
    if (!(r0_ >= 0.0)) throw Error(ErrorKind::InvalidArgument, "R0 must be nonnegative");
}

RadialPotential RadialPotential::power(double c, double s, double r0) {
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "power potential needs s > 0");
    return RadialPotential(fmt::format("power(c={}, s={})", c, s),
                           [c, s](double r) { return c + std::pow(r, s); }, r0);
}

RadialPotential RadialPotential::exponential(double r0) {
    return RadialPotential("exp", [](double r) { return std::exp(r); }, r0);
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> q, double r0) {
    if (r.size() != q.size() || r.size() < 2) {
        throw Error(ErrorKind::MalformedInput, "tabulated potential needs at least two (r, q) pairs");
    }
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) {
            throw Error(ErrorKind::MalformedInput, "tabulated radii must be strictly increasing");
        }
    }
    auto eval = [r = std::move(r), q = std::move(q)](double x) {
        if (x <= r.front()) return q.front();
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t hi = it == r.end() ? r.size() - 1 : static_cast<std::size_t>(it - r.begin());
        const std::size_t lo = hi - 1;
        const double t = (x - r[lo]) / (r[hi] - r[lo]);
        return q[lo] + t * (q[hi] - q[lo]);
    };
    return RadialPotential("table", std::move(eval), r0);
}

RadialPotential RadialPotential::from_csv(const std::filesystem::path& path, double r0) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MalformedInput, fmt::format("cannot open {}", path.string()));
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::MalformedInput, "empty potential table");
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "r,q") {
        throw Error(ErrorKind::MalformedInput, fmt::format("expected header 'r,q', got '{}'", line));
    }
    std::vector<double> rs, qs;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        double rv = 0.0, qv = 0.0;
        char comma = 0;
        if (!(row >> rv >> comma >> qv) || comma != ',') {
            throw Error(ErrorKind::MalformedInput, fmt::format("bad potential row '{}'", line));
        }
        rs.push_back(rv);
        qs.push_back(qv);
    }
    auto pot = tabulated(std::move(rs), std::move(qs), r0);
    return RadialPotential(fmt::format("table({})", path.filename().string()),
                           [p = std::move(pot)](double x) { return p(x); }, r0);
}

namespace {

double simpson(const RadialPotential& pot, double a, double b, std::size_t intervals) {
    if (intervals % 2 == 1) ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    auto g = [&](double r) { return 1.0 / std::sqrt(pot(r)); };
    double s = g(a) + g(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        s += (i % 2 == 1 ? 4.0 : 2.0) * g(a + h * static_cast<double>(i));
    }
    return s * h / 3.0;
}

} // namespace

ClassPReport validate_class_P(const RadialPotential& pot, double r_test, double tol,
                              const ClassPOptions& options) {
    if (!(r_test > 2.0 * pot.r0())) {
        throw Error(ErrorKind::InvalidArgument, "class-P check needs r_test > 2 R0");
    }
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "class-P tolerance must be positive");

    const std::size_t m = std::max<std::size_t>(options.samples, 2);
    for (std::size_t i = 0; i <= m; ++i) {
        const double r = r_test * static_cast<double>(i) / static_cast<double>(m);
        const double q = pot(r);
        if (!(q > 0.0)) {
            throw Error(ErrorKind::NonPositivePotential, fmt::format("q({}) = {} is not positive", r, q));
        }
    }
    double prev = pot(pot.r0());
    for (std::size_t i = 1; i <= m; ++i) {
        const double r = pot.r0() + (r_test - pot.r0()) * static_cast<double>(i) / static_cast<double>(m);
        const double q = pot(r);
        if (q < prev) {
            throw Error(ErrorKind::NotIncreasing,
                        fmt::format("q decreases near r = {} beyond R0 = {}", r, pot.r0()));
        }
        prev = q;
    }

    ClassPReport rep;
    rep.monotone = true;
    rep.r_test = r_test;
    rep.tol = tol;
    rep.tail_near = simpson(pot, 0.25 * r_test, 0.5 * r_test, options.quadrature_intervals);
    rep.tail_far = simpson(pot, 0.5 * r_test, r_test, options.quadrature_intervals);
    rep.decay_ratio = rep.tail_far / rep.tail_near;
    rep.pass = rep.tail_far < tol && rep.decay_ratio <= options.decay_factor;
    return rep;
}

double unit_sphere_area(int space_dim) {
    if (space_dim < 1) throw Error(ErrorKind::InvalidArgument, "space dimension must be >= 1");
    const double half = 0.5 * static_cast<double>(space_dim);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

Grid::Grid(int space_dim, double r_max, std::size_t n)
    : space_dim_(space_dim), r_max_(r_max), sphere_area_(unit_sphere_area(space_dim)) {
    if (!(r_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "r_max must be positive");
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 nodes");
    h_ = r_max / static_cast<double>(n + 1);
    radii_.resize(n);
    weights_.resize(n);
    const double shift = cell_centered() ? 0.5 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (static_cast<double>(i + 1) - shift) * h_;
        radii_[i] = r;
        weights_[i] = sphere_area_ * std::pow(r, space_dim - 1) * h_;
    }
}

double Grid::integrate(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += weights_[i] * f[i];
    return s;
}

double Grid::inner(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += weights_[i] * a[i] * b[i];
    return s;
}

double Grid::l2_norm(std::span<const double> f) const { return std::sqrt(inner(f, f)); }

Grid build_grid(const RadialPotential& pot, int space_dim, double spectral_scale,
                double points_per_unit, const GridOptions& options) {
    if (!(spectral_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "spectral_scale must be positive");
    if (!(points_per_unit > 0.0)) throw Error(ErrorKind::InvalidArgument, "points_per_unit must be positive");
    const double level = options.truncation_factor * spectral_scale;

    double lo = 0.0;
    double hi = -1.0;
    for (double r = options.search_step; r <= options.hard_cap; r += options.search_step) {
        if (pot(r) >= level) {
            hi = r;
            break;
        }
        lo = r;
    }
    if (hi < 0.0) {
        throw Error(ErrorKind::UnboundedSearch,
                    fmt::format("q never reaches {} below r = {}", level, options.hard_cap));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pot(mid) >= level ? hi : lo) = mid;
    }
    const auto n = static_cast<std::size_t>(std::ceil(points_per_unit * hi));
    return Grid(space_dim, hi, n);
}

bool truncation_adequate(const Grid& grid, const RadialPotential& pot, double spectral_value,
                         double factor) {
    return pot(grid.r_max()) >= factor * spectral_value;
}

} // namespace gsp
