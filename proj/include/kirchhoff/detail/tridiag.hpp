#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kirchhoff::detail {

// Thomas algorithm for diagonally dominant tridiagonal systems.
// lower[0] and upper[n-1] are unused.
inline std::vector<double> solve_tridiag(const std::vector<double>& lower,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& upper,
                                         const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double beta = diag[0];
    if (beta == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = diag[i] - lower[i] * c[i - 1];
        if (beta == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
        c[i] = (i + 1 < n) ? upper[i] / beta : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// Tridiagonal solve with partial pivoting (band LU, fill-in one superdiagonal).
// Needed for indefinite Jacobians where plain Thomas may hit small pivots.
inline std::vector<double> solve_tridiag_pivot(std::vector<double> lower,
                                               std::vector<double> diag,
                                               std::vector<double> upper,
                                               std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> fill(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lower[i + 1]) > std::abs(diag[i])) {
            std::swap(diag[i], lower[i + 1]);
            std::swap(upper[i], diag[i + 1]);
            if (i + 2 < n) std::swap(fill[i], upper[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (diag[i] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
        const double m = lower[i + 1] / diag[i];
        diag[i + 1] -= m * upper[i];
        if (i + 2 < n) upper[i + 1] -= m * fill[i];
        rhs[i + 1] -= m * rhs[i];
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        if (i + 1 < n) s -= upper[i] * x[i + 1];
        if (i + 2 < n) s -= fill[i] * x[i + 2];
        if (diag[i] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
        x[i] = s / diag[i];
    }
    return x;
}

}  // namespace kirchhoff::detail
