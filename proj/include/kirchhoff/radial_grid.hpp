#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kirchhoff/detail/tridiag.hpp"

namespace kirchhoff {

// Uniform radial discretization of R^N, N in {1,2,3}, for radially
// symmetric fields. Quadrature weights realize the full-space integral;
// for N = 1 the convention sigma_0 = 2 counts both half-lines.
struct RadialGrid {
    int dim = 3;          // N
    double radius = 0.0;  // R, truncation radius
    int nodes = 0;        // M
    double spacing = 0.0; // h = R/(M-1)
    std::vector<double> r;    // nodes r_i = i*h
    std::vector<double> w;    // quadrature weights = exact cell volumes
    std::vector<double> face; // face[i] = sigma_{N-1} * r_{i+1/2}^{N-1}, size M-1
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline double surface_coefficient(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi;
        default: throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

inline double ball_measure(int dim, double radius) {
    return surface_coefficient(dim) * std::pow(radius, dim) / dim;
}

// Quadrature weights. N = 1, 2: finite-volume weights, node i owning the
// exact volume of the shell between the half-node faces; constants integrate
// to the exact ball measure by telescoping, and sharing the measure between
// quadrature and the flux Laplacian keeps the discrete variational identities
// exact. N = 3: trapezoid weights on the Jacobian r^2; the integrand of any
// smooth even field is even with vanishing odd derivatives at both the origin
// and the (decayed) outer boundary, so Euler-Maclaurin boundary terms vanish
// and the rule converges beyond all polynomial orders. The origin node then
// carries zero weight: the three-dimensional problem is posed in phi = r u,
// for which r = 0 is a Dirichlet point, and u(0) is a derived quantity.
inline GridPtr build_grid(int dim, double radius, int nodes) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    if (!(radius > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    if (nodes < 64) throw std::invalid_argument("node count must be at least 64");

    auto g = std::make_shared<RadialGrid>();
    g->dim = dim;
    g->radius = radius;
    g->nodes = nodes;
    g->spacing = radius / static_cast<double>(nodes - 1);
    g->r.resize(nodes);
    g->w.resize(nodes);
    g->face.resize(nodes - 1);

    const double sigma = surface_coefficient(dim);
    const double h = g->spacing;
    for (int i = 0; i < nodes; ++i) g->r[i] = h * static_cast<double>(i);
    g->r[nodes - 1] = radius;
    for (int i = 0; i + 1 < nodes; ++i) {
        const double rm = g->r[i] + 0.5 * h;
        g->face[i] = sigma * std::pow(rm, dim - 1);
    }
    if (dim == 3) {
        for (int i = 0; i < nodes; ++i) g->w[i] = sigma * g->r[i] * g->r[i] * h;
        g->w[nodes - 1] *= 0.5;
    } else {
        auto shell = [&](double r0, double r1) {
            return sigma / dim * (std::pow(r1, dim) - std::pow(r0, dim));
        };
        for (int i = 0; i < nodes; ++i) {
            const double lo = (i == 0) ? 0.0 : g->r[i] - 0.5 * h;
            const double hi = (i == nodes - 1) ? radius : g->r[i] + 0.5 * h;
            g->w[i] = shell(lo, hi);
        }
    }
    return g;
}

inline bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    return &a == &b || (a.dim == b.dim && a.nodes == b.nodes && a.radius == b.radius);
}

// Radial function samples u_i = u(r_i).
struct Field {
    GridPtr grid;
    std::vector<double> v;

    Field() = default;
    Field(GridPtr g, std::vector<double> values) : grid(std::move(g)), v(std::move(values)) {
        if (static_cast<int>(v.size()) != grid->nodes)
            throw std::invalid_argument("field size does not match grid");
    }

    static Field zero(GridPtr g) {
        std::vector<double> z(g->nodes, 0.0);
        return Field(std::move(g), std::move(z));
    }

    template <class F>
    static Field sample(GridPtr g, F&& fn) {
        std::vector<double> z(g->nodes);
        for (int i = 0; i < g->nodes; ++i) z[i] = fn(g->r[i]);
        return Field(std::move(g), std::move(z));
    }
};

inline void require_same_grid(const Field& a, const Field& b) {
    if (!same_grid(*a.grid, *b.grid)) throw std::invalid_argument("fields live on different grids");
}

inline bool all_finite(const Field& f) {
    return std::all_of(f.v.begin(), f.v.end(), [](double x) { return std::isfinite(x); });
}

inline double integrate(const Field& f) {
    const auto& w = f.grid->w;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f.v[i];
    return s;
}

template <class F>
inline double integrate_of(const Field& f, F&& fn) {
    const auto& w = f.grid->w;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * fn(f.v[i]);
    return s;
}

inline double inner(const Field& a, const Field& b) {
    require_same_grid(a, b);
    const auto& w = a.grid->w;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a.v[i] * b.v[i];
    return s;
}

namespace detail {

// Even quartic extrapolation of a symmetric profile to r = 0 from the first
// three interior nodes.
inline double origin_value(double f1, double f2, double f3) {
    return (15.0 * f1 - 6.0 * f2 + f3) / 10.0;
}

// Numerov curvature of phi = r u for N = 3: solve B y = D2 phi with
// B = I + (h^2/12) D2, which makes y a fourth-order phi''. phi(0) = 0 and
// phi''(0) = 0 hold identically for even u, so the origin row is an exact
// Dirichlet condition; at R the decayed field justifies the same closure.
inline std::vector<double> numerov_phi_curvature(const RadialGrid& g,
                                                 const std::vector<double>& u) {
    const int n = g.nodes;
    const double h = g.spacing;
    std::vector<double> phi(n), rhs(n, 0.0);
    for (int i = 0; i < n; ++i) phi[i] = g.r[i] * u[i];
    std::vector<double> lower(n, 1.0 / 12.0), diag(n, 10.0 / 12.0), upper(n, 1.0 / 12.0);
    for (int i = 1; i + 1 < n; ++i) rhs[i] = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / (h * h);
    lower[0] = upper[0] = 0.0;
    diag[0] = 1.0;
    lower[n - 1] = upper[n - 1] = 0.0;
    diag[n - 1] = 1.0;
    return solve_tridiag(lower, diag, upper, rhs);
}

}  // namespace detail

// Radial Laplacian u'' + (N-1)/r u', with u'(0) = 0 by symmetry and Dirichlet
// zero beyond R. N = 1, 2: conservative flux form, face fluxes divided by the
// cell volumes, self-adjoint in the quadrature inner product with
// Delta u(0) = N u''(0) falling out of the zero-flux center. N = 3: the exact
// reduction Delta u = (r u)'' / r with the Numerov-consistent fourth-order
// curvature; self-adjointness in the quadrature product is exact because
// B^{-1} D2 is a symmetric function of D2.
inline Field laplacian(const Field& u) {
    const auto& g = *u.grid;
    const int n = g.nodes;
    const double h = g.spacing;
    std::vector<double> out(n);
    if (g.dim == 3) {
        const std::vector<double> y = detail::numerov_phi_curvature(g, u.v);
        for (int i = 1; i < n; ++i) out[i] = y[i] / g.r[i];
        out[0] = detail::origin_value(out[1], out[2], out[3]);
    } else {
        for (int i = 0; i < n; ++i) {
            const double flux_out = (i + 1 < n) ? g.face[i] * (u.v[i + 1] - u.v[i]) / h
                                                : g.face[n - 2] * (0.0 - u.v[i]) / h;
            const double flux_in = (i > 0) ? g.face[i - 1] * (u.v[i] - u.v[i - 1]) / h : 0.0;
            out[i] = (flux_out - flux_in) / g.w[i];
        }
    }
    return Field(u.grid, std::move(out));
}

struct FieldNorms {
    double mass = 0.0;    // ||u||_2^2
    double kinetic = 0.0; // ||grad u||_2^2
    double sup = 0.0;     // ||u||_inf
};

// Kinetic norm as the exact quadratic form of the discrete Laplacian:
// <-Delta u, u> = kinetic holds to rounding for fields vanishing at R.
// N = 1, 2 realize it through the staggered (half-node) first-derivative
// stencil; N = 3 through the Numerov curvature of phi = r u.
inline FieldNorms norms(const Field& u) {
    const auto& g = *u.grid;
    FieldNorms out;
    for (int i = 0; i < g.nodes; ++i) {
        out.mass += g.w[i] * u.v[i] * u.v[i];
        out.sup = std::max(out.sup, std::abs(u.v[i]));
    }
    const double h = g.spacing;
    if (g.dim == 3) {
        const std::vector<double> y = detail::numerov_phi_curvature(g, u.v);
        for (int i = 1; i < g.nodes; ++i) out.kinetic -= g.w[i] * u.v[i] * y[i] / g.r[i];
    } else {
        for (int i = 0; i + 1 < g.nodes; ++i) {
            const double du = (u.v[i + 1] - u.v[i]) / h;
            out.kinetic += h * g.face[i] * du * du;
        }
    }
    return out;
}

// Field snapshot format: "# N=<int> R=<float> M=<int>" then M lines "r_i u_i".
inline void write_snapshot(std::ostream& os, const Field& f) {
    const auto& g = *f.grid;
    char buf[128];
    std::snprintf(buf, sizeof buf, "# N=%d R=%.17g M=%d\n", g.dim, g.radius, g.nodes);
    os << buf;
    for (int i = 0; i < g.nodes; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", g.r[i], f.v[i]);
        os << buf;
    }
}

inline void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_snapshot(os, f);
}

inline Field read_snapshot(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("snapshot: missing header");
    int dim = 0, nodes = 0;
    double radius = 0.0;
    if (std::sscanf(header.c_str(), "# N=%d R=%lg M=%d", &dim, &radius, &nodes) != 3)
        throw std::runtime_error("snapshot: malformed header: " + header);
    auto grid = build_grid(dim, radius, nodes);
    std::vector<double> values(nodes);
    for (int i = 0; i < nodes; ++i) {
        double r = 0.0;
        if (!(is >> r >> values[i])) throw std::runtime_error("snapshot: truncated data");
    }
    return Field(std::move(grid), std::move(values));
}

inline Field read_snapshot(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_snapshot(is);
}

}  // namespace kirchhoff
