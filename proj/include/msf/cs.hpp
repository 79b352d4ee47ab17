#ifndef MSF_CS_HPP
#define MSF_CS_HPP

#include <complex>
#include <vector>

#include "msf/grid.hpp"
#include "msf/landau.hpp"
#include "msf/specfun.hpp"

namespace msf {

/// Coherent-state label. Non-integer powers use the principal logarithm:
/// z^n = exp(n Log z), with 0^0 = 1.
struct CSLabel {
    cplx z1 = 0.0;
    cplx z2 = 0.0;
};

cplx principal_pow(cplx z, double n);

/// conj(za^n) zb^n / (conj(za) zb)^n for n = integer + frac: the winding
/// correction when the closed overlap is written in the product label.
cplx overlap_branch_phase(cplx za, cplx zb, double frac);

struct CSTerm {
    int l = 0;
    int m = 0;
    double n1 = 0.0;
    double n2 = 0.0;
    cplx coeff;  // z1^{n1} z2^{n2} / sqrt(Gamma(1+n1) Gamma(1+n2))
};

/// Truncated amplitudes of a coherent state on one branch.
///
/// If every amplitude vanishes (z2 = 0 on branch 0, or z1 = 0 on branch 1
/// with mu > 0) the state is defined by its limit along the vanishing label:
/// only the term of lowest power survives, with coefficient 1, and `limit`
/// is set.
struct CSExpansion {
    int j = 0;
    CSLabel label;
    std::vector<CSTerm> terms;
    specfun::SeriesControl truncation;
    /// sum |coeff|^2; equals N_j(|z1|^2, |z2|^2) unless `limit` is set.
    double norm_const = 0.0;
    bool limit = false;
};

/// Amplitudes of the angular numbers l_start, l_start -+ 1, ... on branch j
/// (descending for j = 0, ascending for j = 1), with Laguerre order
/// -l - mu (j = 0) or l + mu (j = 1). rel_tol applies to amplitudes: the
/// m-sum stops when the geometric bound on the remaining sum |c|^2 drops
/// below rel_tol^2 of the running total, the l-sum after three successive
/// decreasing blocks below that level.
CSExpansion cs_expand_range(int j, int l_start, const CSLabel& label, double mu,
                            const specfun::SeriesControl& ctl);

/// Full expansion of the branch-j coherent state.
CSExpansion cs_expand(int j, const CSLabel& label, double mu, const specfun::SeriesControl& ctl);

/// Inner m-sum for a single angular number l.
CSExpansion cs_branch(int j, int l, const CSLabel& label, double mu, const specfun::SeriesControl& ctl);

/// Normalized coherent state at a point.
cplx cs_state(int j, const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
              const specfun::SeriesControl& ctl);

/// Normalized coherent state sampled as one radial profile per angular mode.
std::vector<GridFunction> cs_sample(const CSExpansion& e, const GridPtr& grid, const FieldConfig& cfg);

/// N_0 = Q_{1-mu}(sqrt u, sqrt v), N_1 = Q_mu(sqrt v, sqrt u).
double cs_normalization(int j, double u, double v, double mu, const specfun::SeriesControl& ctl = {});

/// Q_nu(a, b) for complex a, b (principal square roots already taken).
cplx q_sum_complex(double nu, cplx a, cplx b, const specfun::SeriesControl& ctl = {});

/// Normalized overlap from the closed Q form; 0 across branches.
cplx cs_overlap(int ja, const CSLabel& a, int jb, const CSLabel& b, double mu,
                const specfun::SeriesControl& ctl = {});

/// The same overlap by contracting two truncated expansions.
cplx cs_overlap_contraction(int j, const CSLabel& a, const CSLabel& b, double mu,
                            const specfun::SeriesControl& ctl = {});

/// Zero-flux superposition sqrt(N0) Phi^{(0)} + sqrt(N1) Phi^{(1)} at equal
/// labels. Requires mu = 0 and l0 = 0.
cplx mm_superpose(const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
                  const specfun::SeriesControl& ctl = {});

/// sum_{r1,r2} z1^{r1} z2^{r2} / sqrt(r1! r2!) phi^L_{r1,r2}, with the
/// Landau functions evaluated from their explicit finite sum.
cplx mm_double_series(const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
                      const specfun::SeriesControl& ctl = {});

/// W_0^0 + W_1^0 at (u, v).
double mm_weight_sum(double u, double v);

}  // namespace msf

#endif
