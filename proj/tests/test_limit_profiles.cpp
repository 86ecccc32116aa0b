#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kirchhoff/limit_profiles.hpp"
#include "kirchhoff/functionals.hpp"

using namespace kirchhoff;

namespace {

// Analytic residual of the sech ansatz: w = A s^p with s = sech(k x) has
// w'' = A p k^2 s^p (p tanh^2 - sech^2 * ... ), assembled below in closed form.
double soliton_residual_sup(double m, double K, double q, const GridPtr& grid) {
    const double A = std::pow(q / (2.0 * K), 1.0 / (q - 2.0));
    const double p = 2.0 / (q - 2.0);
    const double k = 0.5 * (q - 2.0) / std::sqrt(m);
    double sup = 0.0;
    for (double x : grid->r) {
        const double s = 1.0 / std::cosh(k * x);
        const double t = std::tanh(k * x);
        const double w = A * std::pow(s, p);
        const double wpp = A * p * k * k * std::pow(s, p) * (p * t * t - (1.0 - t * t));
        sup = std::max(sup, std::abs(-m * wpp + w - K * std::pow(w, q - 1.0)));
    }
    return sup;
}

}  // namespace

TEST_CASE("1-D closed form solves its equation to rounding") {
    auto grid = build_grid(1, 30.0, 2049);
    CHECK(soliton_residual_sup(1.0, 1.0, 4.0, grid) < 1e-12);
    CHECK(soliton_residual_sup(1.0, 1.0, 12.0, grid) < 1e-12);
    CHECK(soliton_residual_sup(4.0, 2.0, 6.0, grid) < 1e-12);
}

TEST_CASE("1-D closed form center values") {
    auto grid = build_grid(1, 30.0, 2049);
    CHECK(closed_form_soliton_1d(1.0, 1.0, 4.0, grid).v[0] ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(closed_form_soliton_1d(1.0, 1.0, 12.0, grid).v[0] ==
          Catch::Approx(std::pow(6.0, 0.1)).epsilon(1e-12));
    // widening: m = 4 doubles the length scale exactly
    auto w1 = closed_form_soliton_1d(1.0, 1.0, 6.0, grid);
    auto w4 = closed_form_soliton_1d(4.0, 1.0, 6.0, grid);
    for (int i = 0; 2 * i < grid->nodes; i += 50)
        CHECK(w4.v[2 * i] == Catch::Approx(w1.v[i]).margin(1e-14));
}

TEST_CASE("shooting matches the 1-D closed form") {
    for (auto [m, K, q] : {std::tuple{1.0, 1.0, 4.0}, {1.0, 1.0, 12.0}, {4.0, 2.0, 6.0}}) {
        LimitProfileOptions opts;
        opts.radius = 15.0 * std::sqrt(m);
        opts.nodes = 32769;
        const LimitProfile prof = solve_limit_profile(1, m, K, q, opts);
        const Field exact = closed_form_soliton_1d(m, K, q, prof.w.grid);
        double sup = 0.0;
        for (int i = 0; i < prof.w.grid->nodes; ++i)
            sup = std::max(sup, std::abs(prof.w.v[i] - exact.v[i]));
        INFO("m=" << m << " K=" << K << " q=" << q << " sup=" << sup);
        CHECK(sup < 1e-6);
    }
}

TEST_CASE("3-D shooting profile: residual, identities, decay") {
    // the dilation (scalar Pohozaev) identity converges at fourth order
    LimitProfileOptions opts;
    opts.radius = 20.0;
    opts.nodes = 16385;
    const LimitProfile prof = solve_limit_profile(3, 1.0, 1.0, 5.0, opts);
    CHECK(prof.center > 1.0);
    CHECK(prof.residual_sup <= 1e-10 * std::max(1.0, std::pow(prof.center, 4.0)));
    // strict decrease and positivity up to the tail
    for (int i = 0; i + 2 < prof.w.grid->nodes; ++i) {
        CHECK(prof.w.v[i] > 0.0);
        CHECK(prof.w.v[i + 1] < prof.w.v[i]);
    }
    // Nehari: m ||grad w||^2 + ||w||^2 = K int w^q
    const double int_wq = integrate_of(prof.w, [&](double s) { return std::pow(s, prof.q); });
    CHECK(prof.kinetic + prof.mass == Catch::Approx(prof.K * int_wq).epsilon(1e-6));
    // Pohozaev: (N-2) m ||grad w||^2 + N ||w||^2 = 2 N K / q int w^q
    CHECK(prof.kinetic + 3.0 * prof.mass ==
          Catch::Approx(6.0 / prof.q * prof.K * int_wq).epsilon(1e-6));
    // exponential tail with rate 1/sqrt(m): fit log(r w) on [0.5 R, 0.8 R],
    // clear of both the core and the Dirichlet-truncation zone near R
    const auto& g = *prof.w.grid;
    const int i1 = static_cast<int>((g.nodes - 1) * 0.8);
    const int i0 = static_cast<int>((g.nodes - 1) * 0.5);
    const double slope = (std::log(g.r[i1] * prof.w.v[i1]) - std::log(g.r[i0] * prof.w.v[i0])) /
                         (g.r[i1] - g.r[i0]);
    CHECK(slope == Catch::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("general (m, K) profile is the rescaled (1, 1) profile") {
    const LimitProfile base = solve_limit_profile(3, 1.0, 1.0, 5.0);
    const double m = 2.5, K = 0.6, q = 5.0;
    const LimitProfile gen = solve_limit_profile(3, m, K, q);
    // w_{m,K}(r) = K^{-1/(q-2)} w_{1,1}(r / sqrt(m))
    detail::CubicSpline interp(base.w.grid->spacing, base.w.v);
    const double amp = std::pow(K, -1.0 / (q - 2.0));
    double sup = 0.0;
    for (int i = 0; i < gen.w.grid->nodes; ++i) {
        const double r = gen.w.grid->r[i] / std::sqrt(m);
        if (r > base.w.grid->radius) break;
        sup = std::max(sup, std::abs(gen.w.v[i] - amp * interp(r)));
    }
    CHECK(sup < 1e-8);
}

TEST_CASE("2-D shooting profile converges") {
    const LimitProfile prof = solve_limit_profile(2, 1.0, 1.0, 8.0);
    CHECK(prof.center > 0.0);
    CHECK(prof.mass > 0.0);
    const double int_wq = integrate_of(prof.w, [&](double s) { return std::pow(s, prof.q); });
    CHECK(prof.kinetic + prof.mass == Catch::Approx(prof.K * int_wq).epsilon(1e-6));
}

TEST_CASE("shooting rejects invalid windows") {
    CHECK_THROWS(solve_limit_profile(3, 1.0, 1.0, 6.0)); // critical
    CHECK_THROWS(solve_limit_profile(3, 1.0, 1.0, 1.5));
    CHECK_THROWS(solve_limit_profile(3, -1.0, 1.0, 5.0));
    CHECK_THROWS(solve_limit_profile(5, 1.0, 1.0, 3.0));
}

TEST_CASE("homogeneous oracle: b = 0 decouples to a closed form") {
    const LimitProfile base = solve_limit_profile(3, 1.0, 1.0, 5.0);
    const double a = 1.7, c = 2.3, p = 5.0;
    const HomogeneousOracle got = homogeneous_selfconsistency_oracle(3, a, 0.0, p, c, base);
    // a mu^2 = theta^{p-2}, theta^2 mu^{-3} ||w||^2 = c
    // => mu^{4/(p-2) - 3} a^{2/(p-2)} = c / ||w||^2
    const double expo = 4.0 / (p - 2.0) - 3.0;
    const double mu = std::pow(c / base.mass * std::pow(a, -2.0 / (p - 2.0)), 1.0 / expo);
    const double theta = std::pow(a * mu * mu, 1.0 / (p - 2.0));
    CHECK(got.mu == Catch::Approx(mu).epsilon(1e-10));
    CHECK(got.theta == Catch::Approx(theta).epsilon(1e-10));
    CHECK(got.lambda == Catch::Approx(std::pow(theta, p - 2.0)).epsilon(1e-10));
}

TEST_CASE("homogeneous oracle satisfies its own system") {
    const LimitProfile base = solve_limit_profile(3, 1.0, 1.0, 5.0);
    const HomogeneousOracle got = homogeneous_selfconsistency_oracle(3, 1.0, 1.0, 5.0, 1.0, base);
    const double D = got.theta * got.theta / got.mu * base.kinetic;
    CHECK((1.0 + D) * got.mu * got.mu ==
          Catch::Approx(std::pow(got.theta, 3.0)).epsilon(1e-10));
    CHECK(got.theta * got.theta * std::pow(got.mu, -3.0) * base.mass ==
          Catch::Approx(1.0).epsilon(1e-10));
    CHECK(got.lambda == std::pow(got.theta, 3.0));
    CHECK(got.gradsq == Catch::Approx(D).epsilon(1e-12));
    CHECK(got.energy > 0.0);
    // wrong base profile is rejected
    CHECK_THROWS(homogeneous_selfconsistency_oracle(3, 1.0, 1.0, 4.5, 1.0, base));
}
