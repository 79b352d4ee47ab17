#ifndef MSF_DIRAC_HPP
#define MSF_DIRAC_HPP

#include <array>
#include <complex>
#include <vector>

#include "msf/cs.hpp"
#include "msf/grid.hpp"
#include "msf/landau.hpp"

namespace msf {

/// (2+1) Dirac problem H = sigma.P + M sigma^3 (xi = +1) in the same field.
/// vartheta = +1 or -1 selects the self-adjoint extension: which l = 0
/// component may be irregular at the origin.
struct DiracConfig {
    FieldConfig cfg;
    double mass = 1.0;
    int vartheta = 1;
    int xi = 1;

    void validate() const;
};

struct RelQuantumNumbers {
    int j = 1;
    int l = 1;
    int m = 0;
    int sigma = 1;
    int l_sigma = 0;  // l - (1 + sigma)/2
    double n1 = 0.0;
    double n2 = 0.0;

    double alpha() const { return j == 0 ? n2 - n1 : n1 - n2; }
};

/// Branch of the angular number l under the extension vartheta: j = 0 for
/// l <= -(1 - vartheta)/2, j = 1 for l >= (1 + vartheta)/2.
int rel_branch_of(int l, int vartheta);

/// Throws DomainError when l is outside the branch or the Laguerre order is
/// <= -1 (the irregular l = 0 states do not exist at mu = 0 for vartheta = -1).
RelQuantumNumbers resolve_rel_qnums(int j, int l, int m, int sigma, const DiracConfig& dc);

/// Scalar factor e^{i(l_sigma - l0) theta} [e^{-i pi l_sigma}] sqrt(gamma/2pi) I(rho).
cplx rel_basis_fn(const RelQuantumNumbers& q, const DiracConfig& dc, double theta, double rho);

/// Transverse energy squared 2 gamma [n1 + (1 + sigma)/2].
double transverse_energy_sq(const RelQuantumNumbers& q, const DiracConfig& dc);

/// sqrt(M^2 + transverse_energy_sq).
double rel_energy(const RelQuantumNumbers& q, const DiracConfig& dc);

/// Two components with their own angular indices.
struct Spinor2 {
    GridFunction up;
    GridFunction down;
};

/// A spinor-valued state that is a sum of angular modes.
using SpinorModes = std::vector<Spinor2>;

/// Four-component state (top and bottom two-spinors).
struct Spinor4 {
    Spinor2 top;
    Spinor2 bottom;
};

/// Mapped grid adequate for states with n1 up to n_max, including the
/// irregular l = 0 profiles of the chosen extension.
GridPtr dirac_grid(const DiracConfig& dc, double n_max, double h = 0.025);

/// u = phi v_sigma on the grid; the empty component carries the angular
/// index that sigma.P maps into.
Spinor2 basis_spinor(const RelQuantumNumbers& q, const DiracConfig& dc, const GridPtr& grid);

/// sigma.P: P_+ raises the angular index of the upper component into the
/// lower one, P_- lowers the lower into the upper. Radial parts by finite
/// differences on a mapped grid. Where the operator annihilates the leading
/// power of the input, the result below rho = 1e-5 is continued by its
/// known power law. Throws ResidualError when the 8th/6th-order gap over
/// rho >= 1e-4, relative to the spinor's derivative scale, exceeds
/// resolution_tol.
Spinor2 apply_sigma_p(const Spinor2& s, const DiracConfig& dc, double resolution_tol = 1e-6);

/// sigma.P applied twice; the resolution guard of the second pass is scaled
/// by the input, so a vanishing first pass (zero mode) does not trip it.
Spinor2 apply_sigma_p_squared(const Spinor2& s, const DiracConfig& dc, double resolution_tol = 1e-6);

struct SigmaPSquaredCheck {
    double expected = 0.0;  // 2 gamma [n1 + (1 + sigma)/2]
    double rayleigh = 0.0;  // (u, (sigma.P)^2 u) / (u, u) over rho >= rho_cut
    double residual = 0.0;  // ||(sigma.P)^2 u - expected u|| / (max(expected, 1) ||u||)
};

SigmaPSquaredCheck sigma_p_squared_check(const RelQuantumNumbers& q, const DiracConfig& dc, const GridPtr& grid,
                                         double rho_cut = 1e-8);

/// H = sigma.P + M sigma^3.
Spinor2 apply_hamiltonian(const Spinor2& s, const DiracConfig& dc);

/// Pi_0(M) applied spectrally: each component is expanded in the scalar
/// basis of its angular index and every coefficient is multiplied by
/// sqrt(M^2 + E_perp^2). Throws ResidualError if the expansion misses the
/// input by more than residual_tol (relative L2).
Spinor2 apply_pi0(const Spinor2& s, const DiracConfig& dc, double residual_tol = 1e-9, int max_levels = 512);

/// (psi, psi')_D = gamma^{-1} int drho dtheta psi^dagger psi'.
cplx inner_product_d(const Spinor2& a, const Spinor2& b, const FieldConfig& cfg);
cplx inner_product_d(const SpinorModes& a, const SpinorModes& b, const FieldConfig& cfg);
cplx inner_product_d(const Spinor4& a, const Spinor4& b, const FieldConfig& cfg);

struct DiracState {
    RelQuantumNumbers q;
    int charge = 1;
    double energy = 0.0;  // signed: +E_+ or -E_-
    Spinor2 psi;
};

/// psi = M {sigma^3 [+-Pi_0 - sigma.P] + M} u with u built from q (q.sigma
/// must equal the charge). Normalized to unit D-norm; the phase makes the
/// first non-negligible grid value real and positive. A vanishing result
/// (massless zero mode) throws DomainError.
DiracState dirac_spinor(const RelQuantumNumbers& q, const DiracConfig& dc, int charge, const GridPtr& grid);

/// Unnormalized string {sigma^3 [+-Pi_0 - sigma.P] + M} applied to u.
Spinor2 dirac_operator_string(const Spinor2& u, const DiracConfig& dc, int charge);

/// Relative L2 residual ||H psi - E psi|| / (|E| ||psi||) over rho >= rho_cut.
double dirac_residual(const DiracState& st, const DiracConfig& dc, double rho_cut = 1e-8);

/// Total angular momentum -i d/dtheta + sigma^3/2 read off the angular
/// indices; throws UsageError if the components disagree.
double total_angular_momentum(const Spinor2& s);

/// sigma^2 psi, mapping xi = +1 states to xi = -1 ones of opposite energy.
Spinor2 sigma2_transform(const Spinor2& s);

/// Relativistic coherent state sum_{l,m} c_{l,m} psi_{+-} / sqrt(M_j).
struct RelCS {
    int j = 0;
    int charge = 1;
    CSLabel label;
    CSExpansion amplitudes;  // l in the expansion is l_sigma
    double norm_const = 0.0;  // M_j = sum |c|^2
    SpinorModes modes;
};

/// Index l_sigma of the first term of branch j for the given charge.
int rel_cs_first_index(int j, int charge, const DiracConfig& dc);

RelCS rel_cs(int j, const CSLabel& label, const DiracConfig& dc, int charge, const GridPtr& grid,
             const specfun::SeriesControl& ctl = {});

/// Overlap from the amplitude series in closed form (Q-function of the
/// leading Laguerre order).
cplx rel_cs_overlap_closed(int j, int charge, const CSLabel& a, const CSLabel& b, const DiracConfig& dc,
                           const specfun::SeriesControl& ctl = {});

/// Overlap by quadrature of the spinor fields.
cplx rel_cs_overlap_quadrature(const RelCS& a, const RelCS& b, const FieldConfig& cfg);

struct OperatorFormCheck {
    cplx quadrature;   // (O u_z, O u_z')_D on the grid
    cplx spectral;     // 2 (Phi, Pi_0 (Pi_0 + M) Phi')_perp
    cplx literal;      // 2 M (Phi, [+-Pi_0 + M] Phi')_perp
};

/// The unnormalized overlap evaluated from the operator string on the
/// scalar coherent state versus its spectral forms.
OperatorFormCheck rel_cs_operator_form(int j, int charge, const CSLabel& a, const CSLabel& b,
                                       const DiracConfig& dc, const GridPtr& grid,
                                       const specfun::SeriesControl& ctl = {});

/// (3+1) state Psi = (a X, b X)/sqrt(a^2 + b^2) with a = p3 + s Mt + M,
/// b = p3 + s Mt - M, Mt = sqrt(M^2 + p3^2); X is the (2+1) state of mass
/// Mt (s = +1) or sigma^3 of the opposite-charge one (s = -1). In the
/// representation alpha_k = 1 (x) sigma_k, beta = tau_3 (x) sigma_3,
/// alpha_3 = tau_1 (x) sigma_3, Sigma_z = 1 (x) sigma_3.
struct Embedded3p1 {
    Spinor4 psi;
    double energy = 0.0;
    double mass_eff = 0.0;
    int s = 1;
    double p3 = 0.0;
};

Embedded3p1 embed_3p1(const RelQuantumNumbers& q, int charge, int s, double p3, const DiracConfig& dc,
                      const GridPtr& grid);

/// H4 = 1 (x) sigma.P + (M tau_3 + p3 tau_1) (x) sigma_3.
Spinor4 apply_hamiltonian_3p1(const Spinor4& s, double p3, const DiracConfig& dc);

/// ||S_z Psi - s Psi|| / ||Psi|| with S_z = (H4 Sigma_z + Sigma_z H4)/(2 Mt)
/// evaluated on the grid.
double spin_residual_3p1(const Embedded3p1& e, const DiracConfig& dc, double rho_cut = 1e-8);

/// ||H4 Psi - E Psi|| / (|E| ||Psi||) over rho >= rho_cut.
double energy_residual_3p1(const Embedded3p1& e, const DiracConfig& dc, double rho_cut = 1e-8);

/// ||(1 - beta)/2 Psi|| / ||Psi||: weight of the components that vanish in
/// the non-relativistic limit.
double small_component_ratio(const Embedded3p1& e, const FieldConfig& cfg);

using Matrix2 = std::array<cplx, 4>;  // row-major

/// Proper-time kernel f_{sigma,l} = A B Xi_sigma at proper time s.
Matrix2 green_kernel_rel(int sigma, int l, const DiracConfig& dc, cplx s, double dtheta, double dt, double rho,
                         double rho_p);

/// Bessel order of B_{sigma,l}.
double rel_kernel_order(int sigma, int l, const DiracConfig& dc);

/// Relative error of the smeared radial limit at s = -i tau, dt = 0:
/// int drho' f(rho, rho') g(rho') / T(s) against 2 i gamma g(rho), with
/// T(s) = e^{i pi/4} / (8 pi^{3/2} s^{1/2}).
double kernel_rel_smearing_error(int sigma, int l, const DiracConfig& dc, double tau, double rho,
                                 double g_center, double g_width);

}  // namespace msf

#endif
