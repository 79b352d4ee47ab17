#ifndef MSF_COMPLETENESS_HPP
#define MSF_COMPLETENESS_HPP

#include <complex>
#include <utility>
#include <vector>

#include "msf/landau.hpp"
#include "msf/specfun.hpp"

namespace msf {

struct WeightSpec {
    int j = 0;
    double mu = 0.0;
};

/// W_0 = pi^{-2} e^{-(u+v)} Q_{1-mu}(sqrt u, sqrt v), W_1 = pi^{-2} e^{-(u+v)} Q_mu(sqrt v, sqrt u).
double weight_fn(const WeightSpec& spec, double u, double v, const specfun::SeriesControl& ctl = {});

/// [erf(sqrt u + sqrt v) -+ erf(sqrt u - sqrt v)] / (2 pi^2), minus sign for j = 0.
double weight_half_closed(int j, double u, double v);

struct MomentResult {
    double quadrature_value = 0.0;
    double gamma_value = 0.0;
    double abs_err = 0.0;
};

/// int_0^inf x^n e^{-x} dx by double-exponential quadrature against Gamma(1+n).
MomentResult moment_check(double n);

/// G(m,n; l,k) = int d^2z1 d^2z2 (W_j/N_j) z1^.. conj(z1)^.. z2^.. conj(z2)^..
/// The angular integrals give Kronecker deltas; the remaining (u, v)
/// integral is done by Gauss-Laguerre quadrature with W/N taken from the
/// Q-series, not from its closed form e^{-(u+v)}.
double g_matrix(int m, int n, int l, int k, double mu, int j, int nodes = 48,
                const specfun::SeriesControl& ctl = {});

/// Gamma(1+m) Gamma(1+m-l-mu) (j = 0) or Gamma(1+m+l+mu) Gamma(1+m) (j = 1).
double g_closed(int m, int l, double mu, int j);

/// <phi_a| int dnu_j(z) |Phi_z><Phi_z| |phi_b> for basis states given as
/// (l, m) pairs on branch j.
std::vector<std::vector<double>> unity_reconstruction(const std::vector<std::pair<int, int>>& basis,
                                                      double mu, int j, int nodes = 48,
                                                      const specfun::SeriesControl& ctl = {});

struct KernelParams {
    int j = 1;
    int l = 0;
    FieldConfig cfg;
    /// Time step; Im <= 0. The Wick-rotated axis is delta_t = -i tau.
    cplx delta_t = cplx(0.0, -0.1);
};

/// Closed-form radial kernel S_l^{(j)}: Bessel index -(l+mu) for j = 0 and
/// l+mu for j = 1.
cplx propagator_closed(const KernelParams& p, double dtheta, double rho, double rho_p);

/// i sum_m e^{-i E Delta t} phi(rho) phi*(rho'), truncated with the
/// geometric bound from e^{-gamma tau m}. Needs Im delta_t < 0.
cplx propagator_series(const KernelParams& p, double dtheta, double rho, double rho_p,
                       const specfun::SeriesControl& ctl = {});

/// Relative error of the smeared limit: int drho' S_l(rho, rho') g(rho')
/// against i (gamma/2pi) g(rho), for the Gaussian g centered at g_center
/// with width g_width, at delta_t = -i tau and dtheta = 0.
double propagator_smearing_error(int j, int l, const FieldConfig& cfg, double tau, double rho,
                                 double g_center, double g_width);

}  // namespace msf

#endif
