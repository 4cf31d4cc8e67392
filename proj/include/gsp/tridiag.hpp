#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsp {

/// Real symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
    double norm_inf() const noexcept;
    std::vector<double> apply(std::span<const double> x) const;
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const SymTridiagonal& t, double x);

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector; // unit Euclidean norm
    double residual = 0.0;      // ||T v - value v||_2
    int iterations = 0;
};

/// k-th smallest eigenpair (k = 0 is the lowest) by Sturm bisection followed
/// by inverse iteration. Throws ConvergenceFailure past max_iterations.
Eigenpair tridiagonal_eigenpair(const SymTridiagonal& t, std::size_t k, int max_iterations = 500);

/// k-th smallest eigenvalue only.
double tridiagonal_eigenvalue(const SymTridiagonal& t, std::size_t k, int max_iterations = 500);

/// LU factorization of the general tridiagonal matrix
///   (T - shift I) with T given by lower/diag/upper bands,
/// using partial pivoting so it stays stable for indefinite shifts.
class TridiagonalLU {
public:
    TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                  std::span<const double> upper, double shift);
    TridiagonalLU(const SymTridiagonal& t, double shift)
        : TridiagonalLU(t.off, t.diag, t.off, shift) {}

    std::size_t size() const noexcept { return d_.size(); }
    bool singular() const noexcept { return singular_; }

    /// Solves in place. Throws SingularResolvent if a pivot vanished.
    void solve_in_place(std::span<double> rhs) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<std::size_t> ipiv_;
    bool singular_ = false;
};

} // namespace gsp
