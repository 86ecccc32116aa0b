#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kirchhoff {

enum class GFamily { PurePower, TwoPower };

// Problem data (a, b, g). The nonlinearity is odd with
//   g(s) = A |s|^{alpha-2} s + B |s|^{beta-2} s   (two-power)
//   g(s) = |s|^{p-2} s                            (pure-power, alpha = beta = p)
// so the limit constants of the small-s / large-s power laws are the literal
// coefficients.
struct NonlinearitySpec {
    double a = 1.0;
    double b = 1.0;
    GFamily family = GFamily::PurePower;
    double A = 1.0;
    double alpha = 5.0;
    double B = 1.0;
    double beta = 5.0;
};

inline NonlinearitySpec pure_power(double a, double b, double p) {
    NonlinearitySpec s;
    s.a = a;
    s.b = b;
    s.family = GFamily::PurePower;
    s.A = s.B = 1.0;
    s.alpha = s.beta = p;
    return s;
}

inline NonlinearitySpec two_power(double a, double b, double A, double alpha, double B,
                                  double beta) {
    NonlinearitySpec s;
    s.a = a;
    s.b = b;
    s.family = GFamily::TwoPower;
    s.A = A;
    s.alpha = alpha;
    s.B = B;
    s.beta = beta;
    return s;
}

// Critical exponent 2* for the admissible window; +inf in dimensions 1 and 2.
inline double critical_exponent(int dim) {
    return dim == 3 ? 6.0 : std::numeric_limits<double>::infinity();
}

struct GValues {
    double g = 0.0;         // g(s)
    double G = 0.0;         // primitive, G(0) = 0
    double Gtilde = 0.0;    // (1/2) g(s) s - G(s)
    double gp = 0.0;        // g'(s)
    double Gtilde_p = 0.0;  // Gtilde'(s)
    double Gtilde_pp = 0.0; // Gtilde''(s)
};

inline GValues evaluate(const NonlinearitySpec& spec, double s) {
    const double as = std::abs(s);
    GValues out;
    if (as == 0.0) return out;
    auto term = [&](double coef, double q) {
        const double pw = std::pow(as, q - 2.0);
        out.g += coef * pw * s;
        out.G += coef * pw * as * as / q;
        out.Gtilde += coef * (0.5 - 1.0 / q) * pw * as * as;
        out.gp += coef * (q - 1.0) * pw;
        out.Gtilde_p += coef * (0.5 * q - 1.0) * pw * s;
        out.Gtilde_pp += coef * (0.5 * q - 1.0) * (q - 1.0) * pw;
    };
    term(spec.A, spec.alpha);
    if (spec.family == GFamily::TwoPower) term(spec.B, spec.beta);
    return out;
}

struct AssumptionReport {
    bool pass = false;
    // G1..G5 individually, in order
    bool item[5] = {false, false, false, false, false};
    double witness = 0.0; // first violating s, when any
    std::string message;

    std::string first_failure() const {
        static const char* names[5] = {"G1", "G2", "G3", "G4", "G5"};
        for (int i = 0; i < 5; ++i)
            if (!item[i]) return names[i];
        return "";
    }
};

inline std::vector<double> default_sample_grid() {
    std::vector<double> s;
    const int per_decade = 10;
    for (int k = -6 * per_decade; k <= 6 * per_decade; ++k)
        s.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
    return s;
}

// Validate the standing assumptions on the mass-supercritical window and the
// sampled structural inequalities. Gtilde' is taken by central differences
// with relative step 1e-6 * max(|s|, 1).
inline AssumptionReport check_assumptions(const NonlinearitySpec& spec, int dim,
                                          const std::vector<double>& samples = default_sample_grid()) {
    AssumptionReport rep;
    std::ostringstream msg;

    if (!(spec.a > 0.0) || !(spec.b > 0.0)) {
        rep.message = "Kirchhoff coefficients must satisfy a > 0, b > 0";
        return rep;
    }

    // G1: continuity and oddness, sampled (our families are closed-form odd).
    rep.item[0] = true;
    for (double s : samples) {
        const GValues plus = evaluate(spec, s), minus = evaluate(spec, -s);
        if (plus.g != -minus.g || plus.G != minus.G) {
            rep.item[0] = false;
            rep.witness = s;
            msg << "G1: g not odd at s=" << s;
            rep.message = msg.str();
            return rep;
        }
    }

    // G2: exponent window and the sandwich alpha G <= g s <= beta G.
    const double lower = 2.0 + 8.0 / dim;
    const double upper = critical_exponent(dim);
    if (!(spec.alpha > lower) || !(spec.alpha <= spec.beta) || !(spec.beta < upper)) {
        msg << "G2: exponents (alpha=" << spec.alpha << ", beta=" << spec.beta
            << ") outside (" << lower << ", " << upper << ") for N=" << dim;
        rep.message = msg.str();
        return rep;
    }
    const double slack = 1e-12;
    for (double s : samples) {
        const GValues v = evaluate(spec, s);
        const double gs = v.g * s;
        if (!(v.G > 0.0) || gs < spec.alpha * v.G * (1.0 - slack) ||
            gs > spec.beta * v.G * (1.0 + slack)) {
            rep.witness = s;
            msg << "G2: alpha G <= g s <= beta G violated at s=" << s;
            rep.message = msg.str();
            return rep;
        }
    }
    rep.item[1] = true;

    // G3: Gtilde'(s) s >= alpha Gtilde(s), Gtilde' by central differences.
    for (double s : samples) {
        const double step = 1e-6 * std::max(std::abs(s), 1.0);
        const double dG =
            (evaluate(spec, s + step).Gtilde - evaluate(spec, s - step).Gtilde) / (2.0 * step);
        const double lhs = dG * s;
        const double rhs = spec.alpha * evaluate(spec, s).Gtilde;
        if (lhs < rhs - 1e-6 * std::max(std::abs(rhs), 1e-300)) {
            rep.witness = s;
            msg << "G3: Gtilde'(s) s >= alpha Gtilde(s) violated at s=" << s;
            rep.message = msg.str();
            return rep;
        }
    }
    rep.item[2] = true;

    // G4/G5: power-law limits at the extreme samples, within 1%.
    const double s_small = samples.front(), s_large = samples.back();
    const double ratio_small = evaluate(spec, s_small).g / std::pow(s_small, spec.alpha - 1.0);
    if (!(std::abs(ratio_small / spec.A - 1.0) <= 0.01)) {
        rep.witness = s_small;
        msg << "G4: g(s)/s^(alpha-1) -> A fails, ratio=" << ratio_small;
        rep.message = msg.str();
        return rep;
    }
    rep.item[3] = true;
    const double B_eff = spec.family == GFamily::PurePower ? spec.A : spec.B;
    const double ratio_large = evaluate(spec, s_large).g / std::pow(s_large, spec.beta - 1.0);
    if (!(std::abs(ratio_large / B_eff - 1.0) <= 0.01)) {
        rep.witness = s_large;
        msg << "G5: g(s)/s^(beta-1) -> B fails, ratio=" << ratio_large;
        rep.message = msg.str();
        return rep;
    }
    rep.item[4] = true;

    rep.pass = true;
    rep.message = "all assumptions satisfied";
    return rep;
}

}  // namespace kirchhoff
