#include <doctest.h>

#include <cmath>

#include "msf/errors.hpp"
#include "msf/grid.hpp"
#include "msf/specfun.hpp"

using namespace msf;

TEST_CASE("generalized Gauss-Laguerre moments") {
    const Quadrature q = make_quadrature(0.5, 20);
    // int x^7 e^{-x} x^{1/2} dx = Gamma(8.5), mpmath.
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        acc += q.weights[i] * std::pow(q.nodes[i], 7);
    }
    CHECK(std::abs(acc / 14034.407293483413 - 1.0) < 1e-13);

    for (int k = 0; k < 40; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            s += q.weights[i] * std::pow(q.nodes[i], k);
        }
        CHECK(std::abs(s / std::exp(specfun::ln_gamma(1.5 + k)) - 1.0) < 1e-11);
    }
    CHECK_THROWS_AS(make_quadrature(-1.0, 10), DomainError);
    CHECK_THROWS_AS(make_quadrature(0.0, 1), DomainError);
}

TEST_CASE("flat weights integrate the bare function") {
    const Quadrature q = make_quadrature(-0.4, 30);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double x = q.nodes[i];
        acc += q.flat_weights[i] * std::exp(-x) * std::pow(x, -0.4) * x * x;
    }
    CHECK(std::abs(acc - std::exp(specfun::ln_gamma(2.6))) < 1e-12);
}

TEST_CASE("Fornberg weights") {
    const auto w = fd_weights(1.0, {0.0, 1.0, 2.0}, 1);
    CHECK(w[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(std::abs(w[1]) < 1e-15);
    CHECK(w[2] == doctest::Approx(0.5).epsilon(1e-15));
    const auto w2 = fd_weights(0.0, {0.0, 1.0, 2.0}, 2);
    CHECK(w2[0] == doctest::Approx(1.0));
    CHECK(w2[1] == doctest::Approx(-2.0));
    CHECK_THROWS_AS(fd_weights(0.0, {0.0, 1.0}, 2), UsageError);
}

TEST_CASE("mapped grid derivatives") {
    const GridPtr g = RadialGrid::mapped_for(0.3, 40.0);
    std::vector<cplx> f(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = g->nodes()[i];
        f[i] = std::pow(r, 0.65) * std::exp(-0.5 * r);
    }
    const auto d = g->d_rho(f);
    const auto dl = g->d_log(f, 0.325);
    double worst = 0.0;
    double worst_log = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = g->nodes()[i];
        if (r < 1e-3 || r > 30.0) {
            continue;
        }
        const double exact = (0.65 / r - 0.5) * f[i].real();
        worst = std::max(worst, std::abs(d[i] - exact) / std::abs(f[i]) * r);
        // rho^c D(rho^{-c} f) = D f - 2 c f.
        const double exact_log = 2.0 * r * exact - 0.65 * f[i].real();
        worst_log = std::max(worst_log, std::abs(dl[i] - exact_log) / std::abs(f[i]));
    }
    CHECK(worst < 1e-8);
    CHECK(worst_log < 1e-8);
    CHECK(g->resolution_error(f, 1e-4) < 1e-6);

    double norm = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        norm += g->weights()[i] * std::norm(f[i]);
    }
    // int rho^{1.3} e^{-rho} = Gamma(2.3).
    CHECK(std::abs(norm - std::exp(specfun::ln_gamma(2.3))) < 1e-12);

    const GridPtr gauss = RadialGrid::gauss(0.0, 10);
    CHECK_THROWS_AS(gauss->d_rho(std::vector<cplx>(10)), UsageError);
    CHECK_THROWS_AS(g->d_rho(std::vector<cplx>(3)), UsageError);
    CHECK_THROWS_AS(RadialGrid::mapped(0.0, 0.1, 0.05), UsageError);
}
