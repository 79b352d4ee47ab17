#ifndef MSF_LANDAU_HPP
#define MSF_LANDAU_HPP

#include <complex>
#include <vector>

#include "msf/grid.hpp"

namespace msf {

/// Uniform field gamma = eB plus a flux line Phi = Phi_0 (l0 + mu).
/// Units hbar = c = e = 1; the non-relativistic mass is 1.
struct FieldConfig {
    double gamma = 1.0;
    int l0 = 0;
    double mu = 0.0;

    void validate() const;
};

struct QuantumNumbers {
    int j = 1;
    int l = 0;
    int m = 0;
    double n1 = 0.0;
    double n2 = 0.0;

    /// Laguerre order of the radial profile: |l + mu|.
    double alpha() const { return j == 0 ? n2 - n1 : n1 - n2; }
};

/// Branch j = 0 takes l < 0 with (n1, n2) = (m, m - l - mu); branch j = 1
/// takes l >= 0 with (m + l + mu, m).
QuantumNumbers resolve_qnums(int j, int l, int m, const FieldConfig& cfg);

/// Branch that owns the angular number l.
int branch_of(int l);

/// sqrt(gamma / 2 pi).
double state_norm(const FieldConfig& cfg);

/// phi^{(j)}_{n1,n2}(theta, rho) including sqrt(gamma/2pi) and the branch-1
/// phase e^{-i pi l}.
cplx stationary_state(const QuantumNumbers& q, double theta, double rho, const FieldConfig& cfg);

/// Radial part of a stationary state: angular index l - l0, values without
/// the e^{i(l-l0)theta} factor.
GridFunction sample_state(const QuantumNumbers& q, const GridPtr& grid, const FieldConfig& cfg);

/// (n1 + 1/2) gamma.
double energy_nonrel(const QuantumNumbers& q, const FieldConfig& cfg);

/// (f, g)_perp = gamma^{-1} int drho dtheta f* g. The angular integral is
/// done analytically: functions with different angular index are orthogonal.
cplx inner_product_perp(const GridFunction& f, const GridFunction& g, const FieldConfig& cfg);

/// Applies the transverse Hamiltonian to the radial profile of an angular
/// mode with nu = l + mu on a mapped grid:
/// H/gamma = -(rho f'' + f') + (nu^2/(4 rho) + nu/2 + rho/4) f.
std::vector<cplx> apply_radial_hamiltonian(const GridFunction& f, double nu, const FieldConfig& cfg);

/// Relative L2 residual ||H phi - E phi|| / ||E phi|| over rho >= rho_cut.
double eigen_residual(const QuantumNumbers& q, const GridPtr& grid, const FieldConfig& cfg,
                      double rho_cut = 1e-8);

}  // namespace msf

#endif
