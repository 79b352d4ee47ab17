#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msf/errors.hpp"
#include "msf/landau.hpp"
#include "msf/specfun.hpp"

using namespace msf;

TEST_CASE("quantum numbers per branch") {
    FieldConfig cfg;
    cfg.mu = 0.3;
    const QuantumNumbers a = resolve_qnums(0, -2, 1, cfg);
    CHECK(a.n1 == 1.0);
    CHECK(a.n2 == doctest::Approx(2.7));
    CHECK(a.alpha() == doctest::Approx(1.7));
    const QuantumNumbers b = resolve_qnums(1, 2, 1, cfg);
    CHECK(b.n1 == doctest::Approx(3.3));
    CHECK(b.n2 == 1.0);
    CHECK(branch_of(-1) == 0);
    CHECK(branch_of(0) == 1);
    CHECK_THROWS_AS(resolve_qnums(0, 0, 0, cfg), DomainError);
    CHECK_THROWS_AS(resolve_qnums(1, -1, 0, cfg), DomainError);
    CHECK_THROWS_AS(resolve_qnums(1, 0, -1, cfg), DomainError);
    cfg.mu = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("Aharonov-Bohm splitting of Landau levels") {
    FieldConfig cfg;
    cfg.mu = 0.3;
    cfg.gamma = 2.0;
    // Branch 0 keeps the Landau level (n1 = m); branch 1 is shifted by l + mu.
    CHECK(energy_nonrel(resolve_qnums(0, -3, 2, cfg), cfg) == doctest::Approx(5.0));
    CHECK(energy_nonrel(resolve_qnums(1, 1, 2, cfg), cfg) == doctest::Approx(2.0 * 3.8));
}

TEST_CASE("stationary state value") {
    FieldConfig cfg;
    cfg.mu = 0.3;
    const QuantumNumbers q = resolve_qnums(1, 1, 2, cfg);
    const double theta = 0.4;
    const double rho = 1.7;
    const cplx v = stationary_state(q, theta, rho, cfg);
    // sqrt(1/2pi) e^{i theta} e^{-i pi} I_{3.3,2}(1.7); I from mpmath.
    const double radial = std::sqrt(1.0 / (2.0 * std::numbers::pi)) * specfun::laguerre_fn(3.3, 2, 1.7);
    const cplx want = std::polar(1.0, theta) * -1.0 * radial;
    CHECK(std::abs(v - want) < 1e-14);
}

TEST_CASE("orthonormality and eigen-residual on a mapped grid") {
    FieldConfig cfg;
    cfg.mu = 0.6;
    cfg.l0 = 2;
    const GridPtr g = RadialGrid::mapped_for(0.4, 100.0);
    for (int l : {-3, -1, 0, 2}) {
        for (int m = 0; m < 6; ++m) {
            const QuantumNumbers a = resolve_qnums(branch_of(l), l, m, cfg);
            const GridFunction fa = sample_state(a, g, cfg);
            CHECK(fa.angular == l - 2);
            for (int k = 0; k < 6; ++k) {
                const GridFunction fb = sample_state(resolve_qnums(branch_of(l), l, k, cfg), g, cfg);
                CHECK(std::abs(inner_product_perp(fa, fb, cfg) - (m == k ? 1.0 : 0.0)) < 1e-12);
            }
            CHECK(eigen_residual(a, g, cfg) < 1e-7);
        }
    }
    const GridFunction x = sample_state(resolve_qnums(0, -1, 0, cfg), g, cfg);
    const GridFunction y = sample_state(resolve_qnums(1, 0, 0, cfg), g, cfg);
    CHECK(inner_product_perp(x, y, cfg) == cplx(0.0));
}
