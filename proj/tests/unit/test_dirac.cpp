#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msf/dirac.hpp"
#include "msf/errors.hpp"

using namespace msf;

namespace {

DiracConfig config(double mu, int vartheta, double mass = 1.0) {
    DiracConfig dc;
    dc.cfg.mu = mu;
    dc.vartheta = vartheta;
    dc.mass = mass;
    return dc;
}

}  // namespace

TEST_CASE("relativistic quantum numbers") {
    const DiracConfig dc = config(0.4, 1);
    const RelQuantumNumbers q = resolve_rel_qnums(1, 1, 0, 1, dc);
    CHECK(q.l_sigma == 0);
    CHECK(q.n1 == doctest::Approx(0.4));
    CHECK(rel_energy(q, dc) == doctest::Approx(std::sqrt(3.8)).epsilon(1e-15));
    CHECK(transverse_energy_sq(resolve_rel_qnums(0, -1, 0, -1, dc), dc) == 0.0);
    CHECK(rel_branch_of(0, 1) == 0);
    CHECK(rel_branch_of(0, -1) == 1);
    CHECK(rel_branch_of(-1, -1) == 0);
    // The irregular l = 0 state needs mu > 0 under vartheta = -1.
    CHECK_THROWS_AS(resolve_rel_qnums(1, 0, 0, 1, config(0.0, -1)), DomainError);
    CHECK_NOTHROW(resolve_rel_qnums(1, 0, 0, 1, config(0.3, -1)));
    DiracConfig bad = dc;
    bad.xi = -1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Dirac eigenstates: residual, orthonormality, angular momentum") {
    for (int vt : {1, -1}) {
        const DiracConfig dc = config(0.35, vt);
        const GridPtr g = dirac_grid(dc, 8);
        std::vector<DiracState> states;
        for (int l : {-1, 0, 1}) {
            for (int ch : {1, -1}) {
                const RelQuantumNumbers q = resolve_rel_qnums(rel_branch_of(l, vt), l, 1, ch, dc);
                DiracState st = dirac_spinor(q, dc, ch, g);
                CHECK(dirac_residual(st, dc) < 1e-7);
                CHECK(st.energy * ch > 0.0);
                CHECK(total_angular_momentum(st.psi) == doctest::Approx(l - 0.5));
                const SigmaPSquaredCheck sp = sigma_p_squared_check(q, dc, g);
                CHECK(std::abs(sp.rayleigh - sp.expected) < 1e-8 * std::max(1.0, sp.expected));
                states.push_back(std::move(st));
            }
        }
        for (std::size_t a = 0; a < states.size(); ++a) {
            for (std::size_t b = 0; b < states.size(); ++b) {
                CHECK(std::abs(inner_product_d(states[a].psi, states[b].psi, dc.cfg) - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
        }
        const Spinor2 back = sigma2_transform(sigma2_transform(states[0].psi));
        CHECK(std::abs(inner_product_d(back, states[0].psi, dc.cfg) - 1.0) < 1e-14);
    }
    const DiracConfig massless = config(0.35, 1, 0.0);
    const GridPtr g = dirac_grid(massless, 4);
    CHECK_THROWS_AS(dirac_spinor(resolve_rel_qnums(0, -1, 0, -1, massless), massless, -1, g), DomainError);
    CHECK_THROWS_AS(dirac_spinor(resolve_rel_qnums(0, -1, 0, -1, massless), massless, 1, g), UsageError);
}

TEST_CASE("relativistic coherent state: norm and overlap") {
    const DiracConfig dc = config(0.5, 1);
    const GridPtr g = dirac_grid(dc, 16);
    const CSLabel a{cplx(0.3, 0.1), cplx(-0.2, 0.25)};
    const CSLabel b{cplx(0.2, -0.1), cplx(-0.1, 0.3)};
    const RelCS ca = rel_cs(0, a, dc, 1, g);
    const RelCS cb = rel_cs(0, b, dc, 1, g);
    CHECK(std::abs(rel_cs_overlap_quadrature(ca, ca, dc.cfg) - 1.0) < 1e-10);
    CHECK(std::abs(rel_cs_overlap_quadrature(ca, cb, dc.cfg) - rel_cs_overlap_closed(0, 1, a, b, dc)) < 1e-10);
    const OperatorFormCheck f = rel_cs_operator_form(0, 1, a, b, dc, g);
    CHECK(std::abs(f.quadrature - f.spectral) < 1e-10 * std::abs(f.spectral));
}

TEST_CASE("(3+1) embedding") {
    const DiracConfig dc = config(0.3, 1);
    const GridPtr g = dirac_grid(dc, 8);
    for (int s : {1, -1}) {
        const Embedded3p1 e = embed_3p1(resolve_rel_qnums(1, 1, 1, 1, dc), 1, s, 0.7, dc, g);
        CHECK(std::abs(inner_product_d(e.psi, e.psi, dc.cfg) - 1.0) < 1e-12);
        CHECK(spin_residual_3p1(e, dc) < 1e-10);
        CHECK(energy_residual_3p1(e, dc) < 1e-7);
        CHECK(e.mass_eff == doctest::Approx(std::sqrt(1.49)));
    }
}

TEST_CASE("relativistic kernel: projector and singularity") {
    const DiracConfig dc = config(0.3, 1);
    const Matrix2 up = green_kernel_rel(1, 1, dc, cplx(0.4, -0.3), 0.2, 0.1, 1.0, 1.2);
    CHECK(up[0] != cplx(0.0));
    CHECK(up[1] == cplx(0.0));
    CHECK(up[2] == cplx(0.0));
    CHECK(up[3] == cplx(0.0));
    const Matrix2 down = green_kernel_rel(-1, 1, dc, cplx(0.4, -0.3), 0.2, 0.1, 1.0, 1.2);
    CHECK(down[0] == cplx(0.0));
    CHECK(down[3] != cplx(0.0));
    CHECK_THROWS_AS(green_kernel_rel(1, 1, dc, cplx(std::numbers::pi, 0.0), 0.0, 0.0, 1.0, 1.0), SingularityError);
    double prev = 1e300;
    for (double tau : {1e-2, 3e-3, 1e-3}) {
        const double e = kernel_rel_smearing_error(1, 0, dc, tau, 2.0, 2.0, 0.5);
        CHECK(e < prev);
        prev = e;
    }
}
