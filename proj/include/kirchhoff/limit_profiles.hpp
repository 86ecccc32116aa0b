#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kirchhoff/detail/tridiag.hpp"
#include "kirchhoff/radial_grid.hpp"

namespace kirchhoff {

// Radial positive ground state of -m Delta w + w = K w^{q-1}, w -> 0 at
// infinity. Unique up to translation; here pinned at the origin.
struct LimitProfile {
    int dim = 1;
    double m = 1.0;
    double K = 1.0;
    double q = 4.0;
    Field w;
    double center = 0.0;  // w(0)
    double mass = 0.0;    // ||w||_2^2
    double kinetic = 0.0; // ||grad w||_2^2
    double residual_sup = 0.0;
};

struct LimitProfileOptions {
    double radius = 0.0; // 0 = choose 25 sqrt(m)
    int nodes = 16385;
    double tol = 1e-10;  // relative sup residual target
};

namespace detail {

enum class ShotOutcome { Crossed, TurnedUp, Undecided };

// RK4 on w'' = (w - K w^{q-1})/m - (N-1)/r w', w(0)=s, w'(0)=0, integrated to
// radius. The r=0 singular term uses the symmetric limit w''(0) =
// (w - K w^{q-1})/(m N). Classification thresholds: crossed when w < -1e-14,
// blow-up when w' > 0 while w > 0.
class RadialShot {
  public:
    RadialShot(int dim, double m, double K, double q) : dim_(dim), m_(m), K_(K), q_(q) {}

    ShotOutcome run(double s, double radius, double h, std::vector<double>* trace = nullptr,
                    int stride = 1) const {
        double w = s, p = 0.0, r = 0.0;
        if (trace) trace->push_back(w);
        const long steps = std::lround(radius / h);
        for (long n = 0; n < steps; ++n) {
            rk4_step(r, w, p, h);
            r += h;
            if (trace && (n + 1) % stride == 0) trace->push_back(w);
            if (w < -1e-14) return ShotOutcome::Crossed;
            if (p > 0.0 && w > 0.0) return ShotOutcome::TurnedUp;
            if (!std::isfinite(w)) return ShotOutcome::TurnedUp;
        }
        return ShotOutcome::Undecided;
    }

  private:
    void derivs(double r, double w, double p, double& dw, double& dp) const {
        const double force = (w - K_ * std::pow(std::abs(w), q_ - 2.0) * w) / m_;
        dw = p;
        if (r < 1e-12)
            dp = force / static_cast<double>(dim_);
        else
            dp = force - (dim_ - 1) * p / r;
    }

    void rk4_step(double r, double& w, double& p, double h) const {
        double k1w, k1p, k2w, k2p, k3w, k3p, k4w, k4p;
        derivs(r, w, p, k1w, k1p);
        derivs(r + 0.5 * h, w + 0.5 * h * k1w, p + 0.5 * h * k1p, k2w, k2p);
        derivs(r + 0.5 * h, w + 0.5 * h * k2w, p + 0.5 * h * k2p, k3w, k3p);
        derivs(r + h, w + h * k3w, p + h * k3p, k4w, k4p);
        w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    }

    int dim_;
    double m_, K_, q_;
};

// Decaying solution of the linearized far-field equation -m Delta w + w = 0,
// normalized to 1 at r0. Used to graft the tail beyond the shooting horizon.
inline double linear_tail(int dim, double m, double r0, double r) {
    const double k = 1.0 / std::sqrt(m);
    switch (dim) {
        case 1: return std::exp(-k * (r - r0));
        case 2: return std::cyl_bessel_k(0, k * r) / std::cyl_bessel_k(0, k * r0);
        default: return (r0 / r) * std::exp(-k * (r - r0));
    }
}

}  // namespace detail

// Newton iteration on the grid BVP m(-Delta w) + w - K|w|^{q-2}w = 0 with
// Dirichlet zero at R; polishes a shooting profile to the discrete solution.
// N = 3 uses the Numerov phi = r w form matching the library Laplacian.
inline double newton_polish(const GridPtr& grid, double m, double K, double q,
                            std::vector<double>& w, double tol_abs, int max_iter = 50) {
    const int n = grid->nodes;
    const double h = grid->spacing;
    std::vector<double> lower(n), diag(n), upper(n), F(n);

    if (grid->dim == 3) {
        auto gpow = [&](double s) { return K * std::pow(std::abs(s), q - 2.0); };
        auto residual = [&](const std::vector<double>& wv, std::vector<double>& out) {
            const std::vector<double> y = detail::numerov_phi_curvature(*grid, wv);
            double sup = 0.0;
            for (int i = 1; i + 1 < n; ++i) {
                out[i] = -m * y[i] / grid->r[i] + wv[i] - gpow(wv[i]) * wv[i];
                sup = std::max(sup, std::abs(out[i]));
            }
            out[0] = detail::origin_value(out[1], out[2], out[3]);
            sup = std::max(sup, std::abs(out[0]));
            out[n - 1] = wv[n - 1]; // Dirichlet
            return sup;
        };
        std::vector<double> Fnew(n), wtry(n), rhs(n, 0.0);
        double sup = residual(w, F);
        for (int iter = 0; iter < max_iter && sup > tol_abs; ++iter) {
            // Newton step in phi: [m(-D2) + B diag(1 - (q-1) K |w|^{q-2})] dphi = B (r F)
            std::vector<double> dgv(n, 1.0);
            for (int i = 1; i + 1 < n; ++i) dgv[i] = 1.0 - (q - 1.0) * gpow(w[i]);
            for (int i = 1; i + 1 < n; ++i) {
                lower[i] = -m / (h * h) + dgv[i - 1] / 12.0;
                upper[i] = -m / (h * h) + dgv[i + 1] / 12.0;
                diag[i] = 2.0 * m / (h * h) + 10.0 * dgv[i] / 12.0;
                const double f0 = grid->r[i - 1] * F[i - 1], f1 = grid->r[i] * F[i],
                             f2 = grid->r[i + 1] * F[i + 1];
                rhs[i] = (i == 1 ? 10.0 * f1 + f2 : (i + 2 == n ? f0 + 10.0 * f1 : f0 + 10.0 * f1 + f2)) / 12.0;
            }
            lower[0] = upper[0] = 0.0;
            diag[0] = 1.0;
            rhs[0] = 0.0;
            lower[n - 1] = upper[n - 1] = 0.0;
            diag[n - 1] = 1.0;
            rhs[n - 1] = 0.0;
            auto step = detail::solve_tridiag_pivot(lower, diag, upper, rhs);
            double damp = 1.0;
            for (int bt = 0; bt < 40; ++bt, damp *= 0.5) {
                for (int i = 1; i + 1 < n; ++i) wtry[i] = w[i] - damp * step[i] / grid->r[i];
                wtry[0] = detail::origin_value(wtry[1], wtry[2], wtry[3]);
                wtry[n - 1] = 0.0;
                const double sup_new = residual(wtry, Fnew);
                if (sup_new < sup) {
                    w.swap(wtry);
                    F.swap(Fnew);
                    sup = sup_new;
                    break;
                }
            }
        }
        return sup;
    }

    auto residual = [&](const std::vector<double>& wv, std::vector<double>& out) {
        double sup = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double up = (i + 1 < n) ? wv[i + 1] : 0.0;
            const double dn = (i > 0) ? wv[i - 1] : wv[i];
            const double flux_out = grid->face[i] * (up - wv[i]) / h;
            const double flux_in = (i > 0) ? grid->face[i - 1] * (wv[i] - dn) / h : 0.0;
            const double lap = (flux_out - flux_in) / grid->w[i];
            out[i] = -m * lap + wv[i] - K * std::pow(std::abs(wv[i]), q - 2.0) * wv[i];
            sup = std::max(sup, std::abs(out[i]));
        }
        out[n - 1] = wv[n - 1]; // Dirichlet
        return sup;
    };

    std::vector<double> Fnew(n), wtry(n);
    double sup = residual(w, F);
    for (int iter = 0; iter < max_iter && sup > tol_abs; ++iter) {
        for (int i = 0; i + 1 < n; ++i) {
            const double cu = (i + 1 < n) ? grid->face[i] / (h * grid->w[i]) : 0.0;
            const double cl = (i > 0) ? grid->face[i - 1] / (h * grid->w[i]) : 0.0;
            lower[i] = -m * cl;
            upper[i] = -m * cu;
            diag[i] = m * (cu + cl) + 1.0 - K * (q - 1.0) * std::pow(std::abs(w[i]), q - 2.0);
        }
        lower[n - 1] = 0.0;
        upper[n - 1] = 0.0;
        diag[n - 1] = 1.0;
        auto step = detail::solve_tridiag_pivot(lower, diag, upper, F);
        double damp = 1.0;
        for (int bt = 0; bt < 40; ++bt, damp *= 0.5) {
            for (int i = 0; i < n; ++i) wtry[i] = w[i] - damp * step[i];
            const double sup_new = residual(wtry, Fnew);
            if (sup_new < sup) {
                w.swap(wtry);
                F.swap(Fnew);
                sup = sup_new;
                break;
            }
        }
    }
    return sup;
}

// Shooting with bisection on w(0), then Newton polish on the grid.
inline LimitProfile solve_limit_profile(int dim, double m, double K, double q,
                                        const LimitProfileOptions& opts = {}) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    if (!(m > 0.0) || !(K > 0.0)) throw std::invalid_argument("m and K must be positive");
    if (!(q > 2.0)) throw std::invalid_argument("exponent must exceed 2");
    if (dim == 3 && !(q < 6.0)) throw std::invalid_argument("exponent must be subcritical (q < 6 for N=3)");

    const double radius = opts.radius > 0.0 ? opts.radius : 25.0 * std::sqrt(m);
    auto grid = build_grid(dim, radius, opts.nodes);
    const double h = grid->spacing;

    detail::RadialShot shot(dim, m, K, q);
    const double h_ode = std::min(h, radius / 8192.0);

    // Below s0 = (1/K)^{1/(q-2)} the trajectory turns up immediately; expand
    // upward until it crosses zero.
    double lo = std::pow(1.0 / K, 1.0 / (q - 2.0));
    double hi = 2.0 * lo;
    int guard = 0;
    while (shot.run(hi, radius, h_ode) != detail::ShotOutcome::Crossed) {
        hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("shooting: no zero crossing found");
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-14 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const auto outcome = shot.run(mid, radius, h_ode);
        if (outcome == detail::ShotOutcome::Crossed)
            hi = mid;
        else if (outcome == detail::ShotOutcome::TurnedUp)
            lo = mid;
        else
            break; // decayed across the whole domain: converged
    }
    const double s_star = 0.5 * (lo + hi);

    // Trace at grid resolution, then graft the linear-decay tail where the
    // trajectory leaves the trustworthy window.
    std::vector<double> trace;
    trace.reserve(grid->nodes);
    const int stride = std::max(1, static_cast<int>(std::lround(h / h_ode)));
    shot.run(s_star, radius, h / static_cast<double>(stride), &trace, stride);
    std::vector<double> w(grid->nodes, 0.0);
    int good = 0;
    for (int i = 0; i < grid->nodes && i < static_cast<int>(trace.size()); ++i) {
        if (trace[i] <= 0.0 || (i > 0 && trace[i] > trace[i - 1]) || trace[i] < 1e-7 * s_star)
            break;
        w[i] = trace[i];
        good = i;
    }
    if (good < 8) throw std::runtime_error("shooting: bisection interval collapsed without decay");
    for (int i = good + 1; i + 1 < grid->nodes; ++i)
        w[i] = w[good] * detail::linear_tail(dim, m, grid->r[good], grid->r[i]);
    w[grid->nodes - 1] = 0.0;

    const double scale = std::max(1.0, K * std::pow(s_star, q - 1.0));
    // the discrete residual cannot be evaluated below the rounding noise of
    // the Laplacian, ~ eps * m * w / h^2, which dominates on fine grids
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * (m / (h * h)) * s_star;
    const double tol_abs = opts.tol * scale + floor;
    const double sup = newton_polish(grid, m, K, q, w, tol_abs);
    if (sup > tol_abs)
        throw std::runtime_error("limit profile: Newton polish did not reach tolerance");

    LimitProfile prof;
    prof.dim = dim;
    prof.m = m;
    prof.K = K;
    prof.q = q;
    prof.w = Field(grid, std::move(w));
    prof.center = prof.w.v[0];
    const FieldNorms nm = norms(prof.w);
    prof.mass = nm.mass;
    prof.kinetic = nm.kinetic;
    prof.residual_sup = sup;
    return prof;
}

// Analytic 1-D soliton w(x) = K^{-1/(q-2)} (q/2)^{1/(q-2)}
// sech^{2/(q-2)}(((q-2)/2) x / sqrt(m)), sampled on the grid.
inline Field closed_form_soliton_1d(double m, double K, double q, const GridPtr& grid) {
    if (!(q > 2.0)) throw std::invalid_argument("exponent must exceed 2");
    const double amp = std::pow(q / (2.0 * K), 1.0 / (q - 2.0));
    const double rate = 0.5 * (q - 2.0) / std::sqrt(m);
    const double power = 2.0 / (q - 2.0);
    return Field::sample(grid, [&](double r) {
        return amp * std::pow(1.0 / std::cosh(rate * r), power);
    });
}

// Algebraic self-consistency system for the homogeneous case g(s)=|s|^{p-2}s:
// the ansatz u = theta w(mu x) built on the (m=1, K=1, q=p) base profile
// solves the Kirchhoff equation with
//   (a + b D) mu^2 = theta^{p-2} = lambda,  D = theta^2 mu^{2-N} ||grad w||^2,
// and the mass constraint theta^2 mu^{-N} ||w||^2 = c.
struct HomogeneousOracle {
    double theta = 1.0;
    double mu = 1.0;
    double lambda = 1.0;
    double energy = 0.0;  // I at the ansatz, via the base profile integrals
    double gradsq = 0.0;  // D = ||grad u||^2
    double residual = 0.0;
};

inline HomogeneousOracle homogeneous_selfconsistency_oracle(int dim, double a, double b, double p,
                                                            double c, const LimitProfile& base) {
    if (!(base.m == 1.0 && base.K == 1.0 && base.q == p))
        throw std::invalid_argument("oracle base profile must solve the (m=1, K=1, q=p) equation");
    if (base.dim != dim) throw std::invalid_argument("oracle base profile dimension mismatch");
    const double kw = base.kinetic, mw = base.mass;

    // Eliminate theta through the mass constraint, theta^2 = c mu^N / ||w||^2,
    // and solve the remaining scalar equation in mu:
    //   f(mu) = a mu^2 + b (c k_w / m_w) mu^4 - (c mu^N / m_w)^{(p-2)/2} = 0.
    // Dividing by mu^2 gives a + B mu^2 - C mu^s with s = N(p-2)/2 - 2 > 2 in
    // the mass-supercritical range, so f has exactly one positive root:
    // positive near 0, a single interior maximum, negative at infinity.
    const double s_exp = 0.5 * dim * (p - 2.0);
    auto f = [&](double mu) {
        return a * mu * mu + b * (c * kw / mw) * std::pow(mu, 4.0) -
               std::pow(c / mw, 0.5 * (p - 2.0)) * std::pow(mu, s_exp);
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (f(lo) <= 0.0 && ++guard < 2048) lo *= 0.5;
    while (f(hi) > 0.0 && ++guard < 2048) hi *= 2.0;
    if (guard >= 2048 || !(f(lo) > 0.0) || !(f(hi) <= 0.0))
        throw std::runtime_error("homogeneous oracle: failed to bracket the scale equation");
    for (int i = 0; i < 200 && hi - lo > 1e-16 * lo; ++i) {
        const double mid = std::sqrt(lo * hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }

    HomogeneousOracle out;
    out.mu = 0.5 * (lo + hi);
    out.theta = std::sqrt(c * std::pow(out.mu, static_cast<double>(dim)) / mw);
    out.lambda = std::pow(out.theta, p - 2.0);
    const double D = out.theta * out.theta * std::pow(out.mu, 2.0 - dim) * kw;
    out.gradsq = D;
    const double f1 = (a + b * D) * out.mu * out.mu - out.lambda;
    const double f2 = out.theta * out.theta * std::pow(out.mu, -static_cast<double>(dim)) * mw - c;
    // int w^p = kw + mw by the base profile's own Nehari identity.
    const double int_up =
        std::pow(out.theta, p) * std::pow(out.mu, -static_cast<double>(dim)) * (kw + mw);
    out.energy = 0.5 * a * D + 0.25 * b * D * D - int_up / p;
    out.residual = std::abs(f1) + std::abs(f2);
    return out;
}

}  // namespace kirchhoff
