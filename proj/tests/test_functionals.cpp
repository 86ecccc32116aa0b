#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "kirchhoff/fiber.hpp"
#include "kirchhoff/functionals.hpp"
#include "test_fields.hpp"

using namespace kirchhoff;
using std::numbers::pi;

TEST_CASE("energy of the unit Gaussian matches the closed form (N=3, p=5)") {
    auto g = build_grid(3, 14.0, 16385);
    const Field u = testutil::gaussian(g);
    const auto spec = pure_power(1.0, 1.0, 5.0);
    const EnergyReport rep = energy(spec, u);

    const double mass = std::pow(pi, 1.5);
    const double kin = 1.5 * std::pow(pi, 1.5);
    const double int_u5 = std::pow(2.0 * pi / 5.0, 1.5); // int e^{-5 r^2 / 2}
    CHECK(rep.mass == Catch::Approx(mass).epsilon(1e-6));
    CHECK(rep.kineticA == Catch::Approx(kin).epsilon(1e-6));
    CHECK(rep.potential == Catch::Approx(int_u5 / 5.0).epsilon(1e-6));
    CHECK(rep.I == Catch::Approx(0.5 * kin + 0.25 * kin * kin - int_u5 / 5.0).epsilon(1e-6));
    // P = a k + b k^2 - N (1/2 - 1/p) int u^5
    CHECK(rep.P ==
          Catch::Approx(kin + kin * kin - 3.0 * 0.3 * int_u5).epsilon(1e-6));
    CHECK(pohozaev(spec, u) == rep.P);
}

TEST_CASE("Nehari-mode multiplier zeroes the Nehari residual identically") {
    std::mt19937 rng(11);
    auto g = build_grid(3, 10.0, 2049);
    const auto spec = two_power(1.3, 0.7, 1.0, 5.0, 0.5, 5.5);
    for (int k = 0; k < 5; ++k) {
        const Field u = testutil::mixture(g, rng);
        const double lam = lagrange_multiplier(spec, u, MultiplierMode::Nehari);
        const double scale = g_integrals(spec, u).gu;
        CHECK(std::abs(nehari_residual(spec, u, lam)) < 1e-12 * scale);
    }
}

TEST_CASE("multiplier mode difference equals P[u]/c") {
    std::mt19937 rng(13);
    for (int dim : {1, 2, 3}) {
        auto g = build_grid(dim, 10.0, 2049);
        const auto spec = two_power(1.0, 2.0, 1.0, 3.0 + 8.0 / dim, 1.0, 3.5 + 8.0 / dim);
        const Field u = testutil::mixture(g, rng);
        const double c = norms(u).mass;
        const double diff = lagrange_multiplier(spec, u, MultiplierMode::PohozaevDifference) -
                            lagrange_multiplier(spec, u, MultiplierMode::Nehari);
        CHECK(diff == Catch::Approx(pohozaev(spec, u) / c).epsilon(1e-12));
        // equivalently: the Nehari residual at the difference-mode multiplier is P
        const double lam_pd = lagrange_multiplier(spec, u, MultiplierMode::PohozaevDifference);
        CHECK(nehari_residual(spec, u, lam_pd) ==
              Catch::Approx(pohozaev(spec, u)).epsilon(1e-12));
    }
}

TEST_CASE("multiplier rejects the zero field") {
    auto g = build_grid(3, 10.0, 257);
    CHECK_THROWS_WITH(lagrange_multiplier(pure_power(1, 1, 5), Field::zero(g)),
                      Catch::Matchers::ContainsSubstring("zero-mass"));
}

TEST_CASE("pde residual matches a hand-assembled evaluation") {
    std::mt19937 rng(17);
    auto g = build_grid(2, 8.0, 1025);
    const auto spec = pure_power(0.8, 1.2, 7.0);
    const Field u = testutil::mixture(g, rng);
    const double lam = 0.37;
    const PdeResidual res = pde_residual(spec, u, lam);
    const double d = norms(u).kinetic;
    const Field lap = laplacian(u);
    for (int i : {0, 1, 100, 500, 1023}) {
        const double expect =
            -(spec.a + spec.b * d) * lap.v[i] + lam * u.v[i] - evaluate(spec, u.v[i]).g;
        CHECK(res.field.v[i] == Catch::Approx(expect).margin(1e-15));
    }
}

TEST_CASE("fiber action preserves mass and obeys the dilation closed form") {
    auto g = build_grid(3, 16.0, 16385);
    const Field u = testutil::gaussian(g, 1.0, 1.0);
    const double mass0 = norms(u).mass;
    for (double t : {0.5, 0.8, 1.0, 1.3, 2.0}) {
        const Field ut = fiber_action(u, t);
        CHECK(norms(ut).mass == Catch::Approx(mass0).epsilon(5e-7));
        // (t * u)(r) = t^{3/2} e^{-t^2 r^2 / 2}
        double sup_err = 0.0;
        for (int i = 0; i < g->nodes; i += 97) {
            const double expect = std::pow(t, 1.5) * std::exp(-0.5 * t * t * g->r[i] * g->r[i]);
            sup_err = std::max(sup_err, std::abs(ut.v[i] - expect));
        }
        CHECK(sup_err < 1e-9);
    }
    CHECK_THROWS(fiber_action(u, 0.0));
    CHECK_THROWS(fiber_action(u, -1.0));
}

TEST_CASE("fiber values agree with energies of the resampled dilation") {
    std::mt19937 rng(23);
    auto g = build_grid(3, 16.0, 16385);
    const auto spec = pure_power(1.0, 1.0, 5.0);
    Field u = testutil::mixture(g, rng, 0.8, 2.0);
    for (double t : {0.5, 1.0, 1.7}) {
        const FiberValues fv = fiber_values(spec, u, t);
        const EnergyReport rep = energy(spec, fiber_action(u, t));
        CHECK(fv.I == Catch::Approx(rep.I).epsilon(2e-6));
        CHECK(fv.P == Catch::Approx(rep.P).epsilon(2e-6));
    }
    // t = 1 reduces to the plain energy, exactly
    const EnergyReport rep = energy(spec, u);
    const FiberValues fv = fiber_values(spec, u, 1.0);
    CHECK(fv.I == Catch::Approx(rep.I).epsilon(1e-14));
    CHECK(fv.P == Catch::Approx(rep.P).epsilon(1e-14));
}
