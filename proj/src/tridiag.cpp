#include "gsp/tridiag.hpp"

#include "gsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace gsp {

double SymTridiagonal::norm_inf() const noexcept {
    double best = 0.0;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) row += std::abs(off[i - 1]);
        if (i + 1 < n) row += std::abs(off[i]);
        best = std::max(best, row);
    }
    return best;
}

std::vector<double> SymTridiagonal::apply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += off[i - 1] * x[i - 1];
        if (i + 1 < n) s += off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

namespace {

double pivot_floor(const SymTridiagonal& t) {
    double emax = 1.0;
    for (double e : t.off) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax;
}

std::size_t sturm_count_impl(const SymTridiagonal& t, double x, double pivmin) {
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < t.size(); ++i) {
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

struct Bisection {
    double value;
    int iterations;
};

Bisection bisect_eigenvalue(const SymTridiagonal& t, std::size_t k, int max_iterations) {
    const std::size_t n = t.size();
    if (n == 0 || k >= n) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("eigenvalue index {} out of range for size {}", k, n));
    }
    // Gershgorin interval
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off[i - 1]);
        if (i + 1 < n) radius += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    const double pivmin = pivot_floor(t);
    const double eps = std::numeric_limits<double>::epsilon();
    const double span = std::max(std::abs(lo), std::abs(hi));
    lo -= 2.0 * eps * span + pivmin;
    hi += 2.0 * eps * span + pivmin;

    int it = 0;
    while (hi - lo > 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + 4.0 * pivmin) {
        if (++it > max_iterations) {
            throw Error(ErrorKind::ConvergenceFailure,
                        fmt::format("bisection for eigenvalue {} exceeded {} iterations", k, max_iterations));
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count_impl(t, mid, pivmin) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {0.5 * (lo + hi), it};
}

double norm2(std::span<const double> v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

} // namespace

std::size_t sturm_count(const SymTridiagonal& t, double x) {
    if (t.size() == 0) return 0;
    return sturm_count_impl(t, x, pivot_floor(t));
}

double tridiagonal_eigenvalue(const SymTridiagonal& t, std::size_t k, int max_iterations) {
    return bisect_eigenvalue(t, k, max_iterations).value;
}

Eigenpair tridiagonal_eigenpair(const SymTridiagonal& t, std::size_t k, int max_iterations) {
    const Bisection b = bisect_eigenvalue(t, k, max_iterations);
    const std::size_t n = t.size();
    const double scale = std::max(t.norm_inf(), std::numeric_limits<double>::min());
    const double eps = std::numeric_limits<double>::epsilon();

    // Start vector with no special symmetry so it overlaps every eigenvector.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
    }

    double shift = b.value;
    TridiagonalLU lu(t, shift);
    if (lu.singular()) {
        shift += 8.0 * eps * scale;
        lu = TridiagonalLU(t, shift);
    }

    Eigenpair out;
    out.iterations = b.iterations;
    const double target = 1e-13 * scale;
    double residual = std::numeric_limits<double>::infinity();
    double lambda = b.value;
    for (int pass = 0; pass < 8; ++pass) {
        if (++out.iterations > max_iterations) break;
        lu.solve_in_place(x);
        const double nrm = norm2(x);
        for (double& v : x) v /= nrm;
        const std::vector<double> tx = t.apply(x);
        lambda = std::inner_product(x.begin(), x.end(), tx.begin(), 0.0);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = tx[i] - lambda * x[i];
            r2 += r * r;
        }
        residual = std::sqrt(r2);
        if (pass >= 1 && residual <= target) break;
    }
    if (!(residual <= 1e-10 * scale)) {
        throw Error(ErrorKind::ConvergenceFailure,
                    fmt::format("inverse iteration for eigenvector {} stalled at residual {:.3e}", k, residual));
    }
    out.value = lambda;
    out.vector = std::move(x);
    out.residual = residual;
    return out;
}

TridiagonalLU::TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                             std::span<const double> upper, double shift)
    : dl_(lower.begin(), lower.end()),
      d_(diag.begin(), diag.end()),
      du_(upper.begin(), upper.end()) {
    const std::size_t n = d_.size();
    for (double& v : d_) v -= shift;
    du2_.assign(n > 2 ? n - 2 : 0, 0.0);
    ipiv_.resize(n);
    std::iota(ipiv_.begin(), ipiv_.end(), std::size_t{0});
    if (n == 0) return;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d_[i]) >= std::abs(dl_[i])) {
            if (d_[i] != 0.0) {
                const double fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            }
        } else {
            const double fact = d_[i] / dl_[i];
            d_[i] = dl_[i];
            dl_[i] = fact;
            const double temp = du_[i];
            du_[i] = d_[i + 1];
            d_[i + 1] = temp - fact * d_[i + 1];
            if (i + 2 < n) {
                du2_[i] = du_[i + 1];
                du_[i + 1] = -fact * du_[i + 1];
            }
            ipiv_[i] = i + 1;
        }
    }
    singular_ = std::any_of(d_.begin(), d_.end(), [](double v) { return v == 0.0; });
}

void TridiagonalLU::solve_in_place(std::span<double> b) const {
    const std::size_t n = d_.size();
    if (b.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "right-hand side size mismatch");
    }
    if (singular_) {
        throw Error(ErrorKind::SingularResolvent, "tridiagonal factor has a zero pivot");
    }
    if (n == 0) return;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t ip = ipiv_[i];
        const double temp = b[2 * i + 1 - ip] - dl_[i] * b[ip];
        b[i] = b[ip];
        b[i + 1] = temp;
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) {
        b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }
}

std::vector<double> TridiagonalLU::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

} // namespace gsp
