#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kirchhoff/detail/interpolate.hpp"
#include "kirchhoff/limit_profiles.hpp"
#include "kirchhoff/solver.hpp"

namespace kirchhoff {

// Blow-up rescalings sending the ground-state family to the limit profiles:
//   large-mass: v(x) = lambda^{1/(2-alpha)} u(x / sqrt(lambda))
//   small-mass: v(x) = lambda^{1/(2-beta)}  u(sqrt(d) x / sqrt(lambda))
enum class RescaleMode { LargeMass, SmallMass };

namespace detail {

struct RescaleFrame {
    double prefactor = 1.0;   // kappa multiplying u
    double space_scale = 1.0; // r = space_scale * x
    double diffusion = 1.0;   // m in -m Delta v + v = ... (unit zeroth-order term)
};

inline RescaleFrame rescale_frame(const GroundState& gs, const NonlinearitySpec& spec,
                                  RescaleMode mode) {
    const double lambda = gs.lambda;
    const double d = gs.gradsq;
    RescaleFrame f;
    if (mode == RescaleMode::LargeMass) {
        f.prefactor = std::pow(lambda, 1.0 / (2.0 - spec.alpha));
        f.space_scale = 1.0 / std::sqrt(lambda);
        f.diffusion = spec.a + spec.b * d;
    } else {
        f.prefactor = std::pow(lambda, 1.0 / (2.0 - spec.beta));
        f.space_scale = std::sqrt(d) / std::sqrt(lambda);
        f.diffusion = spec.a / d + spec.b;
    }
    return f;
}

}  // namespace detail

// Rescaled field on a fresh unit-order grid sized to the rescaled decay rate.
inline Field rescale(const GroundState& gs, const NonlinearitySpec& spec, RescaleMode mode,
                     int nodes = 4097) {
    if (!(gs.lambda > 0.0)) throw std::invalid_argument("rescale needs lambda > 0");
    const detail::RescaleFrame f = detail::rescale_frame(gs, spec, mode);
    const double radius = 25.0 * std::sqrt(f.diffusion);
    auto grid = build_grid(gs.u.grid->dim, radius, nodes);
    detail::CubicSpline interp(gs.u.grid->spacing, gs.u.v);
    std::vector<double> out(nodes, 0.0);
    for (int i = 0; i < nodes; ++i) {
        const double r = f.space_scale * grid->r[i];
        out[i] = (r > gs.u.grid->radius) ? 0.0 : f.prefactor * interp(r);
    }
    return Field(grid, std::move(out));
}

// Sup-norm residual of the rescaled equation. Computed through the exact
// chain-rule identity res_v = (kappa / lambda) res_u on the native grid, so no
// interpolation error enters:
//   large-mass: -(a + b d) Delta v + v - g(lambda^{1/(alpha-2)} v) / lambda^{(alpha-1)/(alpha-2)}
//   small-mass: -(a/d + b)  Delta v + v - g(lambda^{1/(beta-2)} v)  / lambda^{(beta-1)/(beta-2)}
inline double rescaled_equation_residual(const GroundState& gs, const NonlinearitySpec& spec,
                                         RescaleMode mode) {
    const detail::RescaleFrame f = detail::rescale_frame(gs, spec, mode);
    return f.prefactor / gs.lambda * pde_residual(spec, gs.u, gs.lambda).sup;
}

struct ProfileDistance {
    double l2 = 0.0;
    double h1 = 0.0;
    double sup = 0.0;
};

// Distances by quadrature on the coarser of the two grids; the finer field is
// resampled onto it (zero beyond its own radius).
inline ProfileDistance profile_distance(const Field& v, const Field& w) {
    const Field* coarse = &v;
    const Field* fine = &w;
    if (fine->grid->spacing > coarse->grid->spacing) std::swap(coarse, fine);

    detail::CubicSpline interp(fine->grid->spacing, fine->v);
    const auto& g = *coarse->grid;
    std::vector<double> diff(g.nodes, 0.0);
    for (int i = 0; i < g.nodes; ++i) {
        const double other = (g.r[i] > fine->grid->radius) ? 0.0 : interp(g.r[i]);
        diff[i] = coarse->v[i] - other;
    }
    Field df(coarse->grid, std::move(diff));
    const FieldNorms n = norms(df);
    ProfileDistance out;
    out.l2 = std::sqrt(n.mass);
    out.h1 = std::sqrt(n.mass + n.kinetic);
    out.sup = n.sup;
    return out;
}

// The six c-comparable quantities, their pairwise ratios, and the structural
// ratio checks that follow from the growth sandwich on G.
struct ComparabilityReport {
    // order: M_c, lambda_c * c, d + d^2, int G, int Gtilde, int g(u)u
    double quantity[6] = {0, 0, 0, 0, 0, 0};
    double ratio[6][6] = {};
    bool all_positive = false;
    double gu_over_G = 0.0;     // in [alpha, beta]
    double gtilde_over_G = 0.0; // in [alpha/2 - 1, beta/2 - 1]
};

inline const char* comparable_quantity_name(int i) {
    static const char* names[6] = {"M", "lambda_c", "d+d^2", "intG", "intGtilde", "intgu"};
    return names[i];
}

inline ComparabilityReport comparability_report(const GroundState& gs,
                                                const NonlinearitySpec& spec) {
    const GIntegrals gi = g_integrals(spec, gs.u);
    ComparabilityReport rep;
    rep.quantity[0] = gs.energy;
    rep.quantity[1] = gs.lambda * gs.c;
    rep.quantity[2] = gs.gradsq + gs.gradsq * gs.gradsq;
    rep.quantity[3] = gi.G;
    rep.quantity[4] = gi.Gtilde;
    rep.quantity[5] = gi.gu;
    rep.all_positive = true;
    for (double q : rep.quantity)
        if (!(q > 0.0) || !std::isfinite(q)) rep.all_positive = false;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) rep.ratio[i][j] = rep.quantity[i] / rep.quantity[j];
    rep.gu_over_G = gi.gu / gi.G;
    rep.gtilde_over_G = gi.Gtilde / gi.G;
    return rep;
}

struct SweepRecord {
    double c = 0.0;
    bool solved = false;
    std::string error;
    double M = 0.0;
    double lambda = 0.0;
    double lambda_c = 0.0; // lambda * c
    double d = 0.0;
    double intG = 0.0;
    double intGtilde = 0.0;
    double intgu = 0.0;
    double u0 = 0.0;
    ProfileDistance distU; // large-mass rescale vs U
    ProfileDistance distV; // small-mass rescale vs V
    double rescaled_res_U = 0.0;
    double rescaled_res_V = 0.0;
};

struct TrendReport {
    bool mass_endpoints = false;       // M_c bigger at small c by the factor
    bool multiplier_endpoints = false; // lambda_c * c likewise
    bool center_endpoints = false;     // u_c(0) likewise
    bool gradient_endpoints = false;   // d_c larger at smallest c
    bool dist_U_trend = false;         // distance to U decreasing toward large c
    bool dist_V_trend = false;         // distance to V decreasing toward small c
    bool continuity = true;            // |M_{1.01 c} - M_c| / M_c small (when requested)
    bool comparability_band = false;   // pairwise ratios inside the band
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

struct SweepOptions {
    SolveOptions solve;
    double endpoint_factor = 100.0; // required small-c / large-c gain
    double continuity_c = 0.0;      // 0 disables the continuity probe
    double continuity_eps = 1e-2;
    double continuity_bound = 0.05;
    double comparability_band = 50.0;
    int trend_tail = 4; // points examined by each distance trend
};

struct SweepResult {
    std::vector<SweepRecord> records;
    TrendReport trend;
    LimitProfile U;
    LimitProfile V;
    bool all_solved = false;
};

namespace detail {

inline void require(TrendReport& rep, bool& flag, bool ok, const std::string& what) {
    flag = ok;
    if (!ok) rep.failures.push_back(what);
}

}  // namespace detail

// Solve each mass in the list, assemble records in c order, and check the
// endpoint/monotonicity trends. Solver failures are recorded per-c and the
// sweep continues.
inline SweepResult sweep(int dim, const NonlinearitySpec& spec, std::vector<double> c_list,
                         const SweepOptions& opts = {}) {
    if (c_list.empty()) throw std::invalid_argument("sweep needs at least one mass");
    std::sort(c_list.begin(), c_list.end());
    if (!(c_list.front() > 0.0)) throw std::invalid_argument("sweep masses must be positive");

    SweepResult out;
    out.U = solve_limit_profile(dim, spec.a, spec.A, spec.alpha);
    out.V = solve_limit_profile(dim, spec.b, spec.B, spec.beta);

    out.all_solved = true;
    for (double c : c_list) {
        SweepRecord rec;
        rec.c = c;
        try {
            const GroundState gs = solve_ground_state(dim, spec, c, opts.solve);
            const GIntegrals gi = g_integrals(spec, gs.u);
            rec.solved = true;
            rec.M = gs.energy;
            rec.lambda = gs.lambda;
            rec.lambda_c = gs.lambda * c;
            rec.d = gs.gradsq;
            rec.intG = gi.G;
            rec.intGtilde = gi.Gtilde;
            rec.intgu = gi.gu;
            rec.u0 = gs.u.v[0];
            rec.distU = profile_distance(rescale(gs, spec, RescaleMode::LargeMass), out.U.w);
            rec.distV = profile_distance(rescale(gs, spec, RescaleMode::SmallMass), out.V.w);
            rec.rescaled_res_U = rescaled_equation_residual(gs, spec, RescaleMode::LargeMass);
            rec.rescaled_res_V = rescaled_equation_residual(gs, spec, RescaleMode::SmallMass);
        } catch (const std::exception& e) {
            rec.error = e.what();
            out.all_solved = false;
        }
        out.records.push_back(std::move(rec));
    }

    TrendReport& tr = out.trend;
    std::vector<const SweepRecord*> ok;
    for (const auto& r : out.records)
        if (r.solved) ok.push_back(&r);
    if (ok.size() < 2) {
        tr.failures.push_back("fewer than two solved masses; no trends to check");
        return out;
    }
    const SweepRecord& lo = *ok.front();
    const SweepRecord& hi = *ok.back();
    const double f = opts.endpoint_factor;
    detail::require(tr, tr.mass_endpoints, lo.M >= f * hi.M, "M endpoint factor");
    detail::require(tr, tr.multiplier_endpoints, lo.lambda_c >= f * hi.lambda_c,
                    "lambda*c endpoint factor");
    detail::require(tr, tr.center_endpoints, lo.u0 >= f * hi.u0, "u(0) endpoint factor");
    detail::require(tr, tr.gradient_endpoints, lo.d > hi.d, "d endpoint direction");

    const int tail = std::min<int>(opts.trend_tail, static_cast<int>(ok.size()));
    bool u_trend = true;
    for (int k = static_cast<int>(ok.size()) - tail; k + 1 < static_cast<int>(ok.size()); ++k)
        if (!(ok[k + 1]->distU.h1 < ok[k]->distU.h1)) u_trend = false;
    detail::require(tr, tr.dist_U_trend, u_trend, "distance to U not decreasing toward large c");
    bool v_trend = true;
    for (int k = 0; k + 1 < tail; ++k)
        if (!(ok[k]->distV.h1 < ok[k + 1]->distV.h1)) v_trend = false;
    detail::require(tr, tr.dist_V_trend, v_trend, "distance to V not decreasing toward small c");

    if (opts.continuity_c > 0.0) {
        try {
            const GroundState g0 = solve_ground_state(dim, spec, opts.continuity_c, opts.solve);
            const GroundState g1 = solve_ground_state(
                dim, spec, opts.continuity_c * (1.0 + opts.continuity_eps), opts.solve);
            const double rel = std::abs(g1.energy - g0.energy) / std::abs(g0.energy);
            detail::require(tr, tr.continuity, rel <= opts.continuity_bound,
                            "energy continuity proxy");
        } catch (const std::exception& e) {
            detail::require(tr, tr.continuity, false,
                            std::string("continuity probe failed to solve: ") + e.what());
        }
    }

    // factor band around the geometric mean, every pair, every solved mass
    bool band_ok = true;
    for (int i = 0; i < 6 && band_ok; ++i) {
        for (int j = 0; j < 6 && band_ok; ++j) {
            if (i == j) continue;
            double log_sum = 0.0;
            std::vector<double> vals;
            for (const auto* r : ok) {
                const double q[6] = {r->M, r->lambda_c, r->d + r->d * r->d,
                                     r->intG, r->intGtilde, r->intgu};
                const double ratio = q[i] / q[j];
                if (!(ratio > 0.0) || !std::isfinite(ratio)) {
                    band_ok = false;
                    break;
                }
                vals.push_back(ratio);
                log_sum += std::log(ratio);
            }
            if (!band_ok) break;
            const double gm = std::exp(log_sum / static_cast<double>(vals.size()));
            for (double rratio : vals)
                if (rratio > opts.comparability_band * gm || rratio < gm / opts.comparability_band)
                    band_ok = false;
        }
    }
    detail::require(tr, tr.comparability_band, band_ok, "comparability ratio band");
    return out;
}

inline std::string sweep_csv_header() {
    return "c,M,lambda,lambda_c,d,intG,intGtilde,intgu,u0,distL2_U,distH1_U,distL2_V,distH1_V";
}

inline std::string sweep_csv_row(const SweepRecord& r) {
    std::ostringstream os;
    os.precision(17);
    if (!r.solved) {
        os << r.c << ",FAILED,,,,,,,,,,,";
        return os.str();
    }
    os << r.c << ',' << r.M << ',' << r.lambda << ',' << r.lambda_c << ',' << r.d << ','
       << r.intG << ',' << r.intGtilde << ',' << r.intgu << ',' << r.u0 << ','
       << r.distU.l2 << ',' << r.distU.h1 << ',' << r.distV.l2 << ',' << r.distV.h1;
    return os.str();
}

}  // namespace kirchhoff
