#ifndef MSF_SPECFUN_HPP
#define MSF_SPECFUN_HPP

#include <complex>
#include <vector>

namespace msf::specfun {

using cplx = std::complex<double>;

/// Truncation control for the infinite sums of the library.
struct SeriesControl {
    double rel_tol = 1e-14;
    long max_terms = 1'000'000;

    void validate() const;
};

/// Principal-branch log-gamma. Throws DomainError at the poles 0, -1, -2, ...
double ln_gamma(double x);
cplx ln_gamma(cplx z);

/// Associated Laguerre polynomial L_m^alpha(rho), ascending three-term recurrence.
double laguerre_poly(int m, double alpha, double rho);

/// Laguerre function I_{n,m}(rho) = sqrt(m!/Gamma(1+n)) e^{-rho/2} rho^{(n-m)/2} L_m^{n-m}(rho).
///
/// The weight and the polynomial are carried through a normalized recurrence
/// with a separate log scale, so neither the normalization nor e^{-rho/2}
/// overflows for large m or rho. Requires n - m > -1. At rho = 0 with
/// n - m < 0 the profile diverges and SingularityError is thrown.
double laguerre_fn(double n, int m, double rho);

/// Same function in terms of the order alpha = n - m.
double laguerre_fn_alpha(int m, double alpha, double rho);

/// I_{k+alpha,k}(rho) for k = 0..m_max from one pass of the recurrence.
std::vector<double> laguerre_fn_table(int m_max, double alpha, double rho);

/// Modified Bessel function of the first kind I_nu(z), principal branch.
cplx bessel_i(double nu, cplx z);
double bessel_i(double nu, double x);

/// e^{-|Re z|} I_nu(z).
cplx bessel_i_scaled(double nu, cplx z);
double bessel_i_scaled(double nu, double x);

/// ln I_nu(x) for real x > 0, valid where I_nu(x) itself would overflow.
double log_bessel_i(double nu, double x);

double erf(double x);

/// Q_nu(a, b) = sum_{l>=0} (b/a)^{nu+l} I_{nu+l}(2ab) for a, b >= 0, nu > -1.
///
/// At a = 0 the term-wise limit sum_l b^{2(nu+l)}/Gamma(nu+l+1) is used.
/// Throws TruncationError if the tail bound does not drop below ctl.rel_tol
/// within ctl.max_terms terms.
double q_sum(double nu, double a, double b, const SeriesControl& ctl = {});

/// e^{-(a^2+b^2)} Q_nu(a, b); finite for every a, b >= 0.
double q_sum_scaled(double nu, double a, double b, const SeriesControl& ctl = {});

}  // namespace msf::specfun

#endif
