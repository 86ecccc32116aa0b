#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "kirchhoff/detail/interpolate.hpp"
#include "kirchhoff/nonlinearity.hpp"
#include "kirchhoff/radial_grid.hpp"

namespace kirchhoff {

struct EnergyReport {
    double kineticA = 0.0;  // a ||grad u||_2^2
    double kineticB = 0.0;  // b ||grad u||_2^4
    double potential = 0.0; // int G(u)
    double I = 0.0;         // kineticA/2 + kineticB/4 - potential
    double P = 0.0;         // kineticA + kineticB - N int Gtilde(u)
    double mass = 0.0;      // ||u||_2^2
};

struct GIntegrals {
    double G = 0.0;      // int G(u)
    double Gtilde = 0.0; // int Gtilde(u)
    double gu = 0.0;     // int g(u) u
};

inline GIntegrals g_integrals(const NonlinearitySpec& spec, const Field& u) {
    GIntegrals out;
    const auto& w = u.grid->w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const GValues v = evaluate(spec, u.v[i]);
        out.G += w[i] * v.G;
        out.Gtilde += w[i] * v.Gtilde;
        out.gu += w[i] * v.g * u.v[i];
    }
    return out;
}

inline EnergyReport energy(const NonlinearitySpec& spec, const Field& u) {
    const FieldNorms n = norms(u);
    const GIntegrals gi = g_integrals(spec, u);
    EnergyReport rep;
    rep.kineticA = spec.a * n.kinetic;
    rep.kineticB = spec.b * n.kinetic * n.kinetic;
    rep.potential = gi.G;
    rep.I = 0.5 * rep.kineticA + 0.25 * rep.kineticB - rep.potential;
    rep.P = rep.kineticA + rep.kineticB - u.grid->dim * gi.Gtilde;
    rep.mass = n.mass;
    return rep;
}

inline double pohozaev(const NonlinearitySpec& spec, const Field& u) {
    return energy(spec, u).P;
}

// a ||grad u||^2 + b ||grad u||^4 + lambda ||u||^2 - int g(u) u
inline double nehari_residual(const NonlinearitySpec& spec, const Field& u, double lambda) {
    const FieldNorms n = norms(u);
    const GIntegrals gi = g_integrals(spec, u);
    return spec.a * n.kinetic + spec.b * n.kinetic * n.kinetic + lambda * n.mass - gi.gu;
}

enum class MultiplierMode { Nehari, PohozaevDifference };

// Nehari mode is -(1/c)<I'[u], u>; the Pohozaev-difference form agrees with it
// exactly when P[u] = 0 and serves as the cross-check.
inline double lagrange_multiplier(const NonlinearitySpec& spec, const Field& u,
                                  MultiplierMode mode = MultiplierMode::Nehari) {
    const FieldNorms n = norms(u);
    if (!(n.mass > 0.0)) throw std::invalid_argument("undefined multiplier: zero-mass field");
    const GIntegrals gi = g_integrals(spec, u);
    const int dim = u.grid->dim;
    if (mode == MultiplierMode::Nehari)
        return (gi.gu - spec.a * n.kinetic - spec.b * n.kinetic * n.kinetic) / n.mass;
    return (dim * gi.G - 0.5 * (dim - 2) * gi.gu) / n.mass;
}

struct PdeResidual {
    Field field;    // -(a + b||grad u||^2) Delta u + lambda u - g(u), interior nodes
    double sup = 0.0;
};

inline PdeResidual pde_residual(const NonlinearitySpec& spec, const Field& u, double lambda) {
    const double d = norms(u).kinetic;
    const Field lap = laplacian(u);
    std::vector<double> res(u.grid->nodes, 0.0);
    double sup = 0.0;
    const int i0 = u.grid->dim == 3 ? 1 : 0;
    for (int i = i0; i + 1 < u.grid->nodes; ++i) {
        res[i] = -(spec.a + spec.b * d) * lap.v[i] + lambda * u.v[i] - evaluate(spec, u.v[i]).g;
        sup = std::max(sup, std::abs(res[i]));
    }
    if (i0 == 1) {
        // u(0) is a derived value in three dimensions, so no equation is
        // solved there; the residual is the extrapolation of the residual
        // field itself, not of the (much larger) Laplacian, which would
        // leak extrapolation error at the scale of the leading terms.
        res[0] = detail::origin_value(res[1], res[2], res[3]);
        sup = std::max(sup, std::abs(res[0]));
    }
    return PdeResidual{Field(u.grid, std::move(res)), sup};
}

// Mass-preserving dilation (t * u)(x) = t^{N/2} u(t x), resampled onto the
// original grid by monotone cubic interpolation, zero beyond R.
inline Field fiber_action(const Field& u, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("fiber parameter must be positive");
    const auto& g = *u.grid;
    detail::CubicSpline interp(g.spacing, u.v);
    const double amp = std::pow(t, 0.5 * g.dim);
    std::vector<double> out(g.nodes);
    for (int i = 0; i < g.nodes; ++i) {
        const double x = t * g.r[i];
        out[i] = (x > g.radius) ? 0.0 : amp * interp(x);
    }
    return Field(u.grid, std::move(out));
}

// Fiber energy and Pohozaev values by exact change of variables on the native
// grid (no resampling):
//   I_u(t) = (a/2) k t^2 + (b/4) k^2 t^4 - t^{-N} int G(t^{N/2} u)
//   P(t)   = a k t^2 + b k^2 t^4 - N t^{-N} int Gtilde(t^{N/2} u)
struct FiberValues {
    double I = 0.0;
    double P = 0.0;
};

inline FiberValues fiber_values(const NonlinearitySpec& spec, const Field& u, double t,
                                double kinetic) {
    const auto& g = *u.grid;
    const double amp = std::pow(t, 0.5 * g.dim);
    const double tmN = std::pow(t, -static_cast<double>(g.dim));
    double intG = 0.0, intGt = 0.0;
    for (int i = 0; i < g.nodes; ++i) {
        const GValues v = evaluate(spec, amp * u.v[i]);
        intG += g.w[i] * v.G;
        intGt += g.w[i] * v.Gtilde;
    }
    const double k2 = kinetic * t * t;
    FiberValues out;
    out.I = 0.5 * spec.a * k2 + 0.25 * spec.b * k2 * k2 - tmN * intG;
    out.P = spec.a * k2 + spec.b * k2 * k2 - g.dim * tmN * intGt;
    return out;
}

inline FiberValues fiber_values(const NonlinearitySpec& spec, const Field& u, double t) {
    return fiber_values(spec, u, t, norms(u).kinetic);
}

}  // namespace kirchhoff
