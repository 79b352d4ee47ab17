#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "msf/cs.hpp"
#include "msf/errors.hpp"

using namespace msf;

namespace {

CSLabel random_label(std::mt19937_64& rng, double r_max) {
    std::uniform_real_distribution<double> r(0.0, r_max);
    std::uniform_real_distribution<double> phi(-3.14159, 3.14159);
    return {std::polar(r(rng), phi(rng)), std::polar(r(rng), phi(rng))};
}

}  // namespace

TEST_CASE("normalization against the Q oracle") {
    // mpmath: N0 = Q_{0.75}(sqrt 1.3, sqrt 0.4), N1 = Q_{0.25}(sqrt 0.4, sqrt 1.3).
    CHECK(cs_normalization(0, 1.3, 0.4, 0.25) == doctest::Approx(0.89964922194840215).epsilon(1e-13));
    CHECK(cs_normalization(1, 1.3, 0.4, 0.25) == doctest::Approx(4.5323042386191958).epsilon(1e-13));
    // Zero flux: N0 + N1 = e^{u+v}.
    CHECK(cs_normalization(0, 2.0, 3.0, 0.0) + cs_normalization(1, 2.0, 3.0, 0.0) ==
          doctest::Approx(std::exp(5.0)).epsilon(1e-13));
}

TEST_CASE("expansion sum matches the closed normalization") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const CSLabel z = random_label(rng, 1.8);
        for (int j : {0, 1}) {
            const CSExpansion e = cs_expand(j, z, 0.35, {});
            if (e.limit) {
                continue;
            }
            const double n = cs_normalization(j, std::norm(z.z1), std::norm(z.z2), 0.35);
            CHECK(std::abs(e.norm_const / n - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("overlap: closed form, contraction, bounds") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 20; ++k) {
        const CSLabel a = random_label(rng, 1.5);
        const CSLabel b = random_label(rng, 1.5);
        for (int j : {0, 1}) {
            const cplx closed = cs_overlap(j, a, j, b, 0.6);
            const cplx contracted = cs_overlap_contraction(j, a, b, 0.6);
            CHECK(std::abs(closed - contracted) < 1e-12);
            CHECK(std::abs(closed) <= 1.0 + 1e-12);
            CHECK(std::abs(cs_overlap(j, a, j, a, 0.6) - 1.0) < 1e-12);
            CHECK(std::abs(cs_overlap(j, b, j, a, 0.6) - std::conj(closed)) < 1e-12);
        }
        CHECK(cs_overlap(0, a, 1, b, 0.6) == cplx(0.0));
    }
}

TEST_CASE("coherent state is normalized on the plane") {
    FieldConfig cfg;
    cfg.mu = 0.45;
    const CSLabel z{cplx(0.7, -0.2), cplx(0.3, 0.5)};
    const GridPtr g = RadialGrid::mapped_for(0.45, 80.0);
    for (int j : {0, 1}) {
        const CSExpansion e = cs_expand(j, z, cfg.mu, {});
        const std::vector<GridFunction> modes = cs_sample(e, g, cfg);
        cplx norm = 0.0;
        for (const GridFunction& f : modes) {
            norm += inner_product_perp(f, f, cfg);
        }
        CHECK(std::abs(norm - 1.0) < 1e-12);
        // Pointwise value against the sampled modes.
        const double theta = 0.9;
        const std::size_t i = g->size() / 2;
        cplx sum = 0.0;
        for (const GridFunction& f : modes) {
            sum += std::polar(1.0, f.angular * theta) * f.values[i];
        }
        CHECK(std::abs(sum - cs_state(j, z, theta, g->nodes()[i], cfg, {})) < 1e-12);
    }
}

TEST_CASE("zero-label limit") {
    const CSExpansion e = cs_expand(0, {cplx(0.5, 0.1), 0.0}, 0.3, {});
    CHECK(e.limit);
    REQUIRE(e.terms.size() == 1);
    CHECK(e.terms[0].coeff == cplx(1.0));
}

TEST_CASE("zero flux: superposition equals the double series") {
    FieldConfig cfg;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> r(0.1, 4.0);
    for (int k = 0; k < 10; ++k) {
        const CSLabel z = random_label(rng, 1.5);
        const double rho = r(rng);
        const cplx a = mm_superpose(z, 0.3 * k, rho, cfg);
        const cplx b = mm_double_series(z, 0.3 * k, rho, cfg);
        const double scale = std::exp(0.5 * (std::norm(z.z1) + std::norm(z.z2)));
        CHECK(std::abs(a - b) / scale < 1e-13);
    }
    cfg.mu = 0.2;
    CHECK_THROWS_AS(mm_superpose({}, 0.0, 1.0, cfg), DomainError);
    CHECK(mm_weight_sum(2.0, 3.0) == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
}
