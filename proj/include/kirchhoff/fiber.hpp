#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kirchhoff/functionals.hpp"

namespace kirchhoff {

// Log-spaced scan of the fiber map t -> (I[t*u], P[t*u]).
struct FiberScan {
    std::vector<double> t;
    std::vector<double> I;
    std::vector<double> P;
    bool bracketed = false; // P changes sign somewhere on the scan
    double t_u = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Brackets for the projection search may not exceed this window; running into
// the caps signals a degenerate field or an invalid spec, not a tight t_u.
constexpr double kTMin = 1e-6;
constexpr double kTMax = 1e6;

}  // namespace detail

inline FiberScan fiber_scan(const NonlinearitySpec& spec, const Field& u, double t_min,
                            double t_max, int count) {
    if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("bad fiber scan range");
    if (count < 2) throw std::invalid_argument("fiber scan needs at least 2 samples");
    const double kinetic = norms(u).kinetic;
    if (!(kinetic > 0.0)) throw std::invalid_argument("fiber scan of a zero field");

    FiberScan scan;
    scan.t.resize(count);
    scan.I.resize(count);
    scan.P.resize(count);
    const double step = std::log(t_max / t_min) / static_cast<double>(count - 1);
    for (int k = 0; k < count; ++k) {
        scan.t[k] = t_min * std::exp(step * k);
        const FiberValues fv = fiber_values(spec, u, scan.t[k], kinetic);
        scan.I[k] = fv.I;
        scan.P[k] = fv.P;
    }
    for (int k = 0; k + 1 < count; ++k)
        if ((scan.P[k] > 0.0) != (scan.P[k + 1] > 0.0)) scan.bracketed = true;
    return scan;
}

struct FiberProjection {
    double t_u = 1.0;
    Field projected;
};

namespace detail {

// Brent-style bracketed root refinement of t -> P[t*u]: inverse quadratic /
// secant with bisection safeguard. Terminates on |P| below tol or bracket
// collapse.
template <class F>
inline double refine_root(F&& f, double a, double b, double fa, double fb, double tol) {
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
        const double xm = 0.5 * (c - b);
        if (std::abs(fb) <= tol || std::abs(xm) <= tol1) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

}  // namespace detail

// Locate the unique t_u with P[t_u * u] = 0. Exact change-of-variables values
// are used throughout, so the root does not depend on resolving the dilated
// field. Refined until |P| <= 1e-10 * (a k(t) + b k(t)^2) with k(t) the
// projected kinetic norm. With clamp_caps the bracket caps are returned
// instead of thrown.
inline double pohozaev_scale(const NonlinearitySpec& spec, const Field& u,
                             bool clamp_caps = false) {
    const double kinetic = norms(u).kinetic;
    if (!(kinetic > 0.0)) throw std::invalid_argument("cannot project a zero field");

    auto P = [&](double t) { return fiber_values(spec, u, t, kinetic).P; };
    auto scale = [&](double t) {
        const double k = kinetic * t * t;
        return spec.a * k + spec.b * k * k;
    };

    // P > 0 for small t, P < 0 for large t; expand from [1/2, 2] until the
    // sign change is bracketed.
    double lo = 0.5, hi = 2.0;
    double flo = P(lo), fhi = P(hi);
    while (flo <= 0.0) {
        lo *= 0.5;
        if (lo < detail::kTMin) {
            if (clamp_caps) return detail::kTMin;
            throw std::runtime_error("no Pohozaev crossing (small-t cap)");
        }
        flo = P(lo);
    }
    while (fhi >= 0.0) {
        hi *= 2.0;
        if (hi > detail::kTMax) {
            if (clamp_caps) return detail::kTMax;
            throw std::runtime_error("no Pohozaev crossing (large-t cap)");
        }
        fhi = P(hi);
    }

    // Work in log t so the safeguarded steps respect the multiplicative scale.
    auto Plog = [&](double s) { return P(std::exp(s)); };
    const double s_root = detail::refine_root(Plog, std::log(lo), std::log(hi), flo, fhi,
                                              1e-10 * scale(std::sqrt(lo * hi)));
    double t_u = std::exp(s_root);
    // One more tolerance pass against the scale at the located root.
    if (std::abs(P(t_u)) > 1e-10 * scale(t_u)) {
        double a = std::log(lo), b = std::log(hi);
        // fall back to plain bisection against the local scale
        double fa = flo;
        for (int i = 0; i < 200 && std::abs(P(t_u)) > 1e-10 * scale(t_u); ++i) {
            const double mid = 0.5 * (a + b);
            const double fm = Plog(mid);
            if ((fm > 0.0) == (fa > 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
            t_u = std::exp(0.5 * (a + b));
        }
    }
    return t_u;
}

// Project onto the Pohozaev manifold: t_u * u resampled onto the grid of u.
inline FiberProjection project_to_pohozaev(const NonlinearitySpec& spec, const Field& u) {
    const double t_u = pohozaev_scale(spec, u);
    return FiberProjection{t_u, fiber_action(u, t_u)};
}

}  // namespace kirchhoff
