#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msf/completeness.hpp"
#include "msf/errors.hpp"

using namespace msf;

TEST_CASE("weights: series and erf form at mu = 1/2") {
    // mpmath: [erf(sqrt 1.2 + sqrt 0.8) - erf(sqrt 1.2 - sqrt 0.8)] / (2 pi^2).
    CHECK(weight_half_closed(0, 1.2, 0.8) == doctest::Approx(0.039074653028587414).epsilon(1e-14));
    for (double u : {0.0, 0.3, 2.0, 8.5}) {
        for (double v : {0.0, 1.1, 4.0}) {
            for (int j : {0, 1}) {
                CHECK(std::abs(weight_fn({j, 0.5}, u, v) - weight_half_closed(j, u, v)) < 1e-14);
            }
        }
    }
    CHECK_THROWS_AS(weight_fn({0, 0.5}, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(weight_fn({2, 0.5}, 1.0, 0.0), DomainError);
}

TEST_CASE("moments of the weight") {
    for (double n : {-0.9, -0.5, 0.0, 2.5, 12.0}) {
        const MomentResult m = moment_check(n);
        CHECK(m.abs_err / m.gamma_value < 1e-12);
    }
    CHECK(moment_check(7.5).gamma_value == doctest::Approx(14034.407293483413).epsilon(1e-13));
    CHECK_THROWS_AS(moment_check(-1.0), DomainError);
}

TEST_CASE("G-matrix and unity") {
    CHECK(g_closed(2, -1, 0.5, 0) == doctest::Approx(2.0 * std::tgamma(3.5)).epsilon(1e-14));
    for (int l : {-2, 0, 3}) {
        const int j = l < 0 ? 0 : 1;
        for (int m : {0, 3}) {
            CHECK(std::abs(g_matrix(m, m, l, l, 0.3, j) / g_closed(m, l, 0.3, j) - 1.0) < 1e-11);
        }
    }
    CHECK(g_matrix(1, 2, 1, 1, 0.3, 1) == 0.0);
    CHECK_THROWS_AS(g_matrix(0, 0, 1, 1, 0.3, 0), DomainError);
    const auto u = unity_reconstruction({{-1, 0}, {-1, 1}, {-2, 0}}, 0.7, 0);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            CHECK(std::abs(u[a][b] - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("propagator against the mode-sum oracle") {
    KernelParams p;
    p.cfg.mu = 0.3;
    p.delta_t = cplx(0.0, -0.2);
    p.j = 1;
    p.l = 1;
    // mpmath mode sum at tau = 0.2, rho = 1, rho' = 1.5, dtheta = 0.3.
    const cplx want1(-0.016148563070819629, 0.052203914320416132);
    CHECK(std::abs(propagator_closed(p, 0.3, 1.0, 1.5) - want1) < 1e-14);
    CHECK(std::abs(propagator_series(p, 0.3, 1.0, 1.5) - want1) < 1e-14);
    p.j = 0;
    p.l = -2;
    const cplx want0(0.039573752865231117, 0.057844794173778755);
    CHECK(std::abs(propagator_closed(p, 0.3, 1.0, 1.5) - want0) < 1e-14);

    p.delta_t = cplx(0.0, 0.1);
    CHECK_THROWS_AS(propagator_closed(p, 0.0, 1.0, 1.0), DomainError);
    p.delta_t = cplx(2.0 * std::numbers::pi, 0.0);
    CHECK_THROWS_AS(propagator_closed(p, 0.0, 1.0, 1.0), SingularityError);
    p.delta_t = cplx(0.5, 0.0);
    CHECK_THROWS_AS(propagator_series(p, 0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("smeared kernel approaches the delta function") {
    FieldConfig cfg;
    cfg.mu = 0.3;
    double prev = 1e300;
    for (double tau : {0.2, 0.1, 0.05, 0.02}) {
        const double e = propagator_smearing_error(1, 0, cfg, tau, 1.5, 1.5, 0.4);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("weights are positive") {
    for (double mu : {0.0, 0.2, 0.5, 0.95}) {
        for (int j : {0, 1}) {
            for (double u : {0.01, 0.5, 3.0, 9.0}) {
                for (double v : {0.01, 0.5, 3.0, 9.0}) {
                    CHECK(weight_fn({j, mu}, u, v) > 0.0);
                }
            }
        }
    }
}
