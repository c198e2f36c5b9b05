#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace spde {

// Thomas algorithm for a diagonally dominant tridiagonal system.
// diag has n entries, lower/upper have n-1; rhs is overwritten workspace-free
// into x. All our systems (I + dt*stiffness) are strictly diagonally dominant,
// so no pivoting is needed.
inline void solve_tridiagonal(const std::vector<double>& lower,
                              const std::vector<double>& diag,
                              const std::vector<double>& upper,
                              const std::vector<double>& rhs,
                              std::vector<double>& x,
                              std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    assert(lower.size() == n - 1 && upper.size() == n - 1 && rhs.size() == n);
    x.resize(n);
    scratch.resize(n);

    scratch[0] = upper.empty() ? 0.0 : upper[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for (std::size_t j = 1; j < n; ++j) {
        const double denom = diag[j] - lower[j - 1] * scratch[j - 1];
        scratch[j] = (j < n - 1) ? upper[j] / denom : 0.0;
        x[j] = (rhs[j] - lower[j - 1] * x[j - 1]) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;) {
        x[j] -= scratch[j] * x[j + 1];
    }
}

inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs) {
    std::vector<double> x, scratch;
    solve_tridiagonal(lower, diag, upper, rhs, x, scratch);
    return x;
}

}  // namespace spde
