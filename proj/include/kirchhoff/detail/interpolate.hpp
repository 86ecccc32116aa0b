#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kirchhoff/detail/tridiag.hpp"

namespace kirchhoff::detail {

// C^2 cubic spline on the uniform grid x_i = i*h, clamped to zero slope at
// x = 0 (exact for even radial profiles) and not-a-knot at the far end.
// Fourth-order accurate for smooth data; evaluation clamps to the data range.
class CubicSpline {
  public:
    CubicSpline(double h, std::vector<double> values)
        : h_(h), y_(std::move(values)), m_(y_.size(), 0.0) {
        const std::size_t n = y_.size();
        if (n < 4) return;
        std::vector<double> s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (y_[i + 1] - y_[i]) / h_;
        // not-a-knot at the right end decouples: m_{n-2} = (s_{n-2} - s_{n-3})/h
        const double m_pen = (s[n - 2] - s[n - 3]) / h_;
        const std::size_t rows = n - 2; // unknowns m_0 .. m_{n-3}
        std::vector<double> lower(rows, 1.0), diag(rows, 4.0), upper(rows, 1.0), rhs(rows);
        diag[0] = 2.0;
        rhs[0] = 6.0 * s[0] / h_; // zero clamped slope
        for (std::size_t i = 1; i < rows; ++i) rhs[i] = 6.0 * (s[i] - s[i - 1]) / h_;
        rhs[rows - 1] -= m_pen;
        const std::vector<double> sol = solve_tridiag(lower, diag, upper, rhs);
        for (std::size_t i = 0; i < rows; ++i) m_[i] = sol[i];
        m_[n - 2] = m_pen;
        m_[n - 1] = 2.0 * m_pen - m_[n - 3];
    }

    double operator()(double x) const {
        const std::size_t n = y_.size();
        if (x <= 0.0) return y_[0];
        const double xi = x / h_;
        auto i = static_cast<std::size_t>(xi);
        if (i >= n - 1) return y_[n - 1];
        const double t = xi - static_cast<double>(i);
        const double s = 1.0 - t;
        return s * y_[i] + t * y_[i + 1] +
               h_ * h_ / 6.0 * ((s * s * s - s) * m_[i] + (t * t * t - t) * m_[i + 1]);
    }

    double domain_end() const { return h_ * static_cast<double>(y_.size() - 1); }

  private:
    double h_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the nodes
};

// Monotone cubic Hermite interpolant (PCHIP, Fritsch-Butland derivative
// weighting) on a uniform grid x_i = i*h. Preserves monotonicity and
// positivity of the data; third-order accurate away from extrema.
class MonotoneCubic {
  public:
    MonotoneCubic(double h, std::vector<double> values)
        : h_(h), y_(std::move(values)), d_(y_.size(), 0.0) {
        const std::size_t n = y_.size();
        if (n < 2) return;
        std::vector<double> s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (y_[i + 1] - y_[i]) / h_;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] == 0.0 || s[i] == 0.0 || (s[i - 1] > 0) != (s[i] > 0)) {
                d_[i] = 0.0;
            } else {
                // weighted harmonic mean; uniform spacing makes weights equal
                d_[i] = 2.0 * s[i - 1] * s[i] / (s[i - 1] + s[i]);
            }
        }
        d_[0] = endpoint_derivative(s[0], n > 2 ? s[1] : s[0]);
        d_[n - 1] = endpoint_derivative(s[n - 2], n > 2 ? s[n - 3] : s[n - 2]);
    }

    // Evaluate at x; clamps to the data range, zero is NOT assumed beyond it.
    double operator()(double x) const {
        const std::size_t n = y_.size();
        if (x <= 0.0) return y_[0];
        double xi = x / h_;
        auto i = static_cast<std::size_t>(xi);
        if (i >= n - 1) return y_[n - 1];
        const double t = xi - static_cast<double>(i);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h_ * d_[i] + h01 * y_[i + 1] + h11 * h_ * d_[i + 1];
    }

    double domain_end() const { return h_ * static_cast<double>(y_.size() - 1); }

  private:
    // Three-point one-sided estimate, limited to keep the end interval monotone.
    double endpoint_derivative(double s_near, double s_far) const {
        double d = (3.0 * s_near - s_far) / 2.0;
        if (s_near == 0.0 || (d > 0) != (s_near > 0)) return 0.0;
        if (std::abs(d) > 3.0 * std::abs(s_near)) return 3.0 * s_near;
        return d;
    }

    double h_;
    std::vector<double> y_;
    std::vector<double> d_;
};

}  // namespace kirchhoff::detail
