#include "msf/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "msf/errors.hpp"
#include "msf/specfun.hpp"

namespace msf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRhoCut = 1e-8;
constexpr double kInner = 1e-6;
constexpr double kFitLo = 1e-5;

void check_sign(int s, const char* what) {
    if (s != 1 && s != -1) {
        throw DomainError(std::string(what) + " must be +1 or -1");
    }
}

// Laguerre order and n1 of the scalar profile with angular number k
// (= l_sigma) on branch j.
double order_for(int j, int k, double mu) {
    return j == 0 ? -k - mu : k + mu;
}

double n1_for(int j, int k, int m, double mu) {
    return j == 0 ? m : m + k + mu;
}

GridFunction zeros_like(const GridPtr& grid, int angular) {
    return GridFunction{grid, angular, std::vector<cplx>(grid->size(), 0.0)};
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!a.grid || !b.grid || !a.grid->same_as(*b.grid)) {
        throw UsageError("spinor components live on different grids");
    }
}

GridFunction combine(cplx ca, const GridFunction& a, cplx cb, const GridFunction& b) {
    require_same_grid(a, b);
    if (a.angular != b.angular) {
        throw UsageError("cannot add profiles with different angular index");
    }
    GridFunction out{a.grid, a.angular, std::vector<cplx>(a.values.size())};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = ca * a.values[i] + cb * b.values[i];
    }
    return out;
}

GridFunction scaled(cplx c, const GridFunction& a) {
    GridFunction out = a;
    for (cplx& v : out.values) {
        v *= c;
    }
    return out;
}

Spinor2 combine(cplx ca, const Spinor2& a, cplx cb, const Spinor2& b) {
    return {combine(ca, a.up, cb, b.up), combine(ca, a.down, cb, b.down)};
}

Spinor2 apply_sigma3(const Spinor2& s) {
    return {s.up, scaled(-1.0, s.down)};
}

// P_+ (raise = true) or P_- on a profile of angular index kappa. Returns
// the unguarded result and accumulates the resolution gap and scale.
GridFunction apply_p(const GridFunction& f, bool raise, const DiracConfig& dc, double& gap, double& scale) {
    const RadialGrid& g = *f.grid;
    const double nu = f.angular + dc.cfg.l0 + dc.cfg.mu;
    // D f -+ nu f = rho^{+-nu/2} D(rho^{-+nu/2} f): no cancellation for the
    // power rho^{+-nu/2} that the operator annihilates.
    const double c = raise ? 0.5 * nu : -0.5 * nu;
    const auto [gp, sc] = g.resolution_gap(f.values, 10.0 * kFitLo, c);
    gap = std::max(gap, gp);
    scale = std::max(scale, sc);
    const std::vector<cplx> d = g.d_log(f.values, c);
    const double sgn = raise ? -1.0 : 1.0;
    GridFunction out{f.grid, f.angular + (raise ? 1 : -1), std::vector<cplx>(f.values.size())};
    const cplx mi(0.0, -1.0);
    const auto& r = g.nodes();
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = mi * std::sqrt(dc.cfg.gamma / (2.0 * r[i])) * (d[i] + sgn * r[i] * f.values[i]);
    }
    // If f starts like rho^c, the leading term cancels and what remains
    // near the origin is rounding noise amplified by 1/rho. The true result
    // starts like rho^{c+1/2}(A + B rho); fit it at two anchors and use it
    // below the first one.
    auto at = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), x) - r.begin());
    };
    const std::size_t ia = at(0.1 * kInner);
    const std::size_t ib = at(kInner);
    const std::size_t i0 = at(kFitLo);
    const std::size_t i1 = at(10.0 * kFitLo);
    if (ia > 0 && i1 < r.size() && std::abs(f.values[ia]) > 0.0 && std::abs(f.values[ib]) > 0.0) {
        const double lead = std::log(std::abs(f.values[ib]) / std::abs(f.values[ia])) / std::log(r[ib] / r[ia]);
        if (std::abs(lead - c) < 1e-3) {
            const double p = c + 0.5;
            const cplx y0 = out.values[i0] * std::pow(r[i0], -p);
            const cplx y1 = out.values[i1] * std::pow(r[i1], -p);
            const cplx bcoef = (y1 - y0) / (r[i1] - r[i0]);
            const cplx acoef = y0 - bcoef * r[i0];
            for (std::size_t i = 0; i < i0; ++i) {
                out.values[i] = std::pow(r[i], p) * (acoef + bcoef * r[i]);
            }
        }
    }
    return out;
}

Spinor2 sigma_p_guarded(const Spinor2& s, const DiracConfig& dc, double resolution_tol, double scale_floor,
                        double* scale_out) {
    dc.validate();
    require_same_grid(s.up, s.down);
    double gap = 0.0;
    double scale = 0.0;
    Spinor2 out{apply_p(s.down, false, dc, gap, scale), apply_p(s.up, true, dc, gap, scale)};
    if (scale_out != nullptr) {
        *scale_out = scale;
    }
    scale = std::max(scale, scale_floor);
    const double res = scale > 0.0 ? gap / scale : 0.0;
    if (res > resolution_tol) {
        throw ResidualError("apply_sigma_p: grid too coarse for the profile", res);
    }
    return out;
}

double weighted_norm_sq(const GridFunction& f, double rho_cut) {
    double acc = 0.0;
    const auto& r = f.grid->nodes();
    const auto& w = f.grid->weights();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] >= rho_cut) {
            acc += w[i] * std::norm(f.values[i]);
        }
    }
    return acc;
}

double spinor_norm_sq(const Spinor2& s, double rho_cut) {
    return weighted_norm_sq(s.up, rho_cut) + weighted_norm_sq(s.down, rho_cut);
}

// Spectral action of Pi_0 on one component. sigma = +1 for the upper slot.
GridFunction pi0_component(const GridFunction& f, int sigma, const DiracConfig& dc, double tol, int max_levels) {
    const double norm_sq = weighted_norm_sq(f, 0.0);
    if (norm_sq == 0.0) {
        return f;
    }
    const int k = f.angular + dc.cfg.l0;
    const int l = k + (1 + sigma) / 2;
    const int j = rel_branch_of(l, dc.vartheta);
    const double alpha = order_for(j, k, dc.cfg.mu);
    if (!(alpha > -1.0)) {
        throw DomainError("apply_pi0: angular mode has no admissible radial basis");
    }
    const auto& r = f.grid->nodes();
    const auto& w = f.grid->weights();
    const std::size_t n = r.size();
    for (int levels = std::min(32, max_levels);; levels = std::min(2 * levels, max_levels)) {
        const auto nl = static_cast<std::size_t>(levels);
        std::vector<double> table(n * nl);
        std::vector<cplx> coef(nl, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> row = specfun::laguerre_fn_table(levels - 1, alpha, r[i]);
            std::copy(row.begin(), row.end(), table.begin() + static_cast<std::ptrdiff_t>(i * nl));
            const cplx wf = w[i] * f.values[i];
            for (std::size_t m = 0; m < nl; ++m) {
                coef[m] += wf * row[m];
            }
        }
        std::vector<double> energy(nl);
        for (std::size_t m = 0; m < nl; ++m) {
            const double n1 = n1_for(j, k, static_cast<int>(m), dc.cfg.mu);
            energy[m] = std::sqrt(dc.mass * dc.mass + 2.0 * dc.cfg.gamma * (n1 + (1 + sigma) / 2));
        }
        double miss = 0.0;
        GridFunction out{f.grid, f.angular, std::vector<cplx>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = table.data() + i * nl;
            cplx rec = 0.0;
            cplx act = 0.0;
            for (std::size_t m = 0; m < nl; ++m) {
                const cplx c = coef[m] * row[m];
                rec += c;
                act += energy[m] * c;
            }
            miss += w[i] * std::norm(rec - f.values[i]);
            out.values[i] = act;
        }
        const double residual = std::sqrt(miss / norm_sq);
        if (residual <= tol) {
            return out;
        }
        if (levels >= max_levels) {
            throw ResidualError("apply_pi0: basis expansion misses the input", residual);
        }
    }
}

cplx phase_of_first(const Spinor2& s) {
    double peak = 0.0;
    for (std::size_t i = 0; i < s.up.values.size(); ++i) {
        peak = std::max({peak, std::abs(s.up.values[i]), std::abs(s.down.values[i])});
    }
    for (std::size_t i = 0; i < s.up.values.size(); ++i) {
        for (const GridFunction* c : {&s.up, &s.down}) {
            const cplx v = c->values[i];
            if (std::abs(v) > 1e-8 * peak) {
                return std::conj(v) / std::abs(v);
            }
        }
    }
    return 1.0;
}

Spinor2 spinor_scaled(cplx c, const Spinor2& s) {
    return {scaled(c, s.up), scaled(c, s.down)};
}

}  // namespace

void DiracConfig::validate() const {
    cfg.validate();
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw DomainError("DiracConfig: mass must be >= 0");
    }
    check_sign(vartheta, "DiracConfig: vartheta");
    if (xi != 1) {
        throw DomainError("DiracConfig: only xi = +1 is implemented (use sigma2_transform)");
    }
}

int rel_branch_of(int l, int vartheta) {
    check_sign(vartheta, "vartheta");
    return 2 * l <= -(1 - vartheta) ? 0 : 1;
}

RelQuantumNumbers resolve_rel_qnums(int j, int l, int m, int sigma, const DiracConfig& dc) {
    dc.validate();
    check_sign(sigma, "sigma");
    if (j != 0 && j != 1) {
        throw DomainError("resolve_rel_qnums: branch must be 0 or 1");
    }
    if (m < 0) {
        throw DomainError("resolve_rel_qnums: m must be >= 0");
    }
    if (rel_branch_of(l, dc.vartheta) != j) {
        throw DomainError("resolve_rel_qnums: l = " + std::to_string(l) + " is outside branch " +
                          std::to_string(j) + " for vartheta = " + std::to_string(dc.vartheta));
    }
    RelQuantumNumbers q;
    q.j = j;
    q.l = l;
    q.m = m;
    q.sigma = sigma;
    q.l_sigma = l - (1 + sigma) / 2;
    q.n1 = n1_for(j, q.l_sigma, m, dc.cfg.mu);
    q.n2 = j == 0 ? m - q.l_sigma - dc.cfg.mu : m;
    if (!(q.alpha() > -1.0)) {
        throw DomainError("resolve_rel_qnums: Laguerre order <= -1 (no such state at this flux)");
    }
    return q;
}

cplx rel_basis_fn(const RelQuantumNumbers& q, const DiracConfig& dc, double theta, double rho) {
    const RelQuantumNumbers chk = resolve_rel_qnums(q.j, q.l, q.m, q.sigma, dc);
    const double phase = (chk.j == 1 && chk.l_sigma % 2 != 0) ? -1.0 : 1.0;
    const cplx ang = std::polar(1.0, (chk.l_sigma - dc.cfg.l0) * theta);
    return state_norm(dc.cfg) * phase * ang * specfun::laguerre_fn_alpha(chk.m, chk.alpha(), rho);
}

double transverse_energy_sq(const RelQuantumNumbers& q, const DiracConfig& dc) {
    return 2.0 * dc.cfg.gamma * (q.n1 + (1 + q.sigma) / 2);
}

double rel_energy(const RelQuantumNumbers& q, const DiracConfig& dc) {
    return std::sqrt(dc.mass * dc.mass + transverse_energy_sq(q, dc));
}

GridPtr dirac_grid(const DiracConfig& dc, double n_max, double h) {
    dc.validate();
    const double mu = dc.cfg.mu;
    const double alpha_min = dc.vartheta == 1 ? -mu : std::min(0.0, mu - 1.0);
    return RadialGrid::mapped_for(std::max(alpha_min, -0.95), 4.0 * (n_max + 2.0) + 60.0, h);
}

Spinor2 basis_spinor(const RelQuantumNumbers& q, const DiracConfig& dc, const GridPtr& grid) {
    const RelQuantumNumbers chk = resolve_rel_qnums(q.j, q.l, q.m, q.sigma, dc);
    if (grid->kind() != RadialGrid::Kind::Mapped) {
        throw UsageError("basis_spinor: spinors need a mapped grid");
    }
    const int up_index = chk.l - 1 - dc.cfg.l0;
    GridFunction phi{grid, chk.l_sigma - dc.cfg.l0, std::vector<cplx>(grid->size())};
    const double pre = state_norm(dc.cfg) * ((chk.j == 1 && chk.l_sigma % 2 != 0) ? -1.0 : 1.0);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        phi.values[i] = pre * specfun::laguerre_fn_alpha(chk.m, chk.alpha(), grid->nodes()[i]);
    }
    if (chk.sigma == 1) {
        return {phi, zeros_like(grid, up_index + 1)};
    }
    return {zeros_like(grid, up_index), phi};
}

Spinor2 apply_sigma_p(const Spinor2& s, const DiracConfig& dc, double resolution_tol) {
    return sigma_p_guarded(s, dc, resolution_tol, 0.0, nullptr);
}

Spinor2 apply_sigma_p_squared(const Spinor2& s, const DiracConfig& dc, double resolution_tol) {
    double scale = 0.0;
    const Spinor2 once = sigma_p_guarded(s, dc, resolution_tol, 0.0, &scale);
    return sigma_p_guarded(once, dc, resolution_tol, scale, nullptr);
}

SigmaPSquaredCheck sigma_p_squared_check(const RelQuantumNumbers& q, const DiracConfig& dc, const GridPtr& grid,
                                         double rho_cut) {
    const Spinor2 u = basis_spinor(q, dc, grid);
    const Spinor2 s2 = apply_sigma_p_squared(u, dc);
    SigmaPSquaredCheck out;
    out.expected = transverse_energy_sq(q, dc);
    const auto& r = grid->nodes();
    const auto& w = grid->weights();
    cplx num = 0.0;
    double den = 0.0;
    double miss = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < rho_cut) {
            continue;
        }
        for (int c = 0; c < 2; ++c) {
            const cplx uv = c == 0 ? u.up.values[i] : u.down.values[i];
            const cplx sv = c == 0 ? s2.up.values[i] : s2.down.values[i];
            num += w[i] * std::conj(uv) * sv;
            den += w[i] * std::norm(uv);
            miss += w[i] * std::norm(sv - out.expected * uv);
        }
    }
    out.rayleigh = num.real() / den;
    out.residual = std::sqrt(miss / den) / std::max(out.expected, 1.0);
    return out;
}

Spinor2 apply_hamiltonian(const Spinor2& s, const DiracConfig& dc) {
    return combine(1.0, apply_sigma_p(s, dc), dc.mass, apply_sigma3(s));
}

Spinor2 apply_pi0(const Spinor2& s, const DiracConfig& dc, double residual_tol, int max_levels) {
    dc.validate();
    require_same_grid(s.up, s.down);
    return {pi0_component(s.up, 1, dc, residual_tol, max_levels),
            pi0_component(s.down, -1, dc, residual_tol, max_levels)};
}

cplx inner_product_d(const Spinor2& a, const Spinor2& b, const FieldConfig& cfg) {
    return inner_product_perp(a.up, b.up, cfg) + inner_product_perp(a.down, b.down, cfg);
}

cplx inner_product_d(const SpinorModes& a, const SpinorModes& b, const FieldConfig& cfg) {
    cplx acc = 0.0;
    for (const Spinor2& x : a) {
        for (const Spinor2& y : b) {
            acc += inner_product_d(x, y, cfg);
        }
    }
    return acc;
}

cplx inner_product_d(const Spinor4& a, const Spinor4& b, const FieldConfig& cfg) {
    return inner_product_d(a.top, b.top, cfg) + inner_product_d(a.bottom, b.bottom, cfg);
}

Spinor2 dirac_operator_string(const Spinor2& u, const DiracConfig& dc, int charge) {
    check_sign(charge, "charge");
    const Spinor2 pi = apply_pi0(u, dc);
    const Spinor2 sp = apply_sigma_p(u, dc);
    return combine(1.0, apply_sigma3(combine(static_cast<double>(charge), pi, -1.0, sp)), dc.mass, u);
}

DiracState dirac_spinor(const RelQuantumNumbers& q, const DiracConfig& dc, int charge, const GridPtr& grid) {
    check_sign(charge, "charge");
    if (q.sigma != charge) {
        throw UsageError("dirac_spinor: particles use sigma = +1, antiparticles sigma = -1");
    }
    const Spinor2 u = basis_spinor(q, dc, grid);
    Spinor2 psi = dirac_operator_string(u, dc, charge);
    const double norm_sq = inner_product_d(psi, psi, dc.cfg).real();
    const double e = rel_energy(q, dc);
    if (!(norm_sq > 1e-24 * (1.0 + e * e))) {
        throw DomainError("dirac_spinor: zero-norm spinor (massless zero mode)");
    }
    psi = spinor_scaled(1.0 / std::sqrt(norm_sq), psi);
    psi = spinor_scaled(phase_of_first(psi), psi);
    DiracState st;
    st.q = resolve_rel_qnums(q.j, q.l, q.m, q.sigma, dc);
    st.charge = charge;
    st.energy = charge * e;
    st.psi = std::move(psi);
    return st;
}

double dirac_residual(const DiracState& st, const DiracConfig& dc, double rho_cut) {
    const Spinor2 hpsi = apply_hamiltonian(st.psi, dc);
    const Spinor2 diff = combine(1.0, hpsi, -st.energy, st.psi);
    return std::sqrt(spinor_norm_sq(diff, rho_cut) / spinor_norm_sq(st.psi, rho_cut)) / std::abs(st.energy);
}

double total_angular_momentum(const Spinor2& s) {
    if (s.down.angular != s.up.angular + 1) {
        throw UsageError("total_angular_momentum: components are not in a definite J sector");
    }
    return s.up.angular + 0.5;
}

Spinor2 sigma2_transform(const Spinor2& s) {
    const cplx i(0.0, 1.0);
    return {scaled(-i, s.down), scaled(i, s.up)};
}

int rel_cs_first_index(int j, int charge, const DiracConfig& dc) {
    check_sign(charge, "charge");
    check_sign(dc.vartheta, "vartheta");
    const int l_edge = j == 0 ? -(1 - dc.vartheta) / 2 : (1 + dc.vartheta) / 2;
    return l_edge - (1 + charge) / 2;
}

RelCS rel_cs(int j, const CSLabel& label, const DiracConfig& dc, int charge, const GridPtr& grid,
             const specfun::SeriesControl& ctl) {
    dc.validate();
    const int k0 = rel_cs_first_index(j, charge, dc);
    RelCS out;
    out.j = j;
    out.charge = charge;
    out.label = label;
    out.amplitudes = cs_expand_range(j, k0, label, dc.cfg.mu, ctl);
    std::map<int, Spinor2> modes;
    double total = 0.0;
    for (const CSTerm& t : out.amplitudes.terms) {
        const int l = t.l + (1 + charge) / 2;
        const RelQuantumNumbers q = resolve_rel_qnums(j, l, t.m, charge, dc);
        const DiracState st = dirac_spinor(q, dc, charge, grid);
        auto it = modes.find(l);
        if (it == modes.end()) {
            modes.emplace(l, spinor_scaled(t.coeff, st.psi));
        } else {
            it->second = combine(1.0, it->second, t.coeff, st.psi);
        }
        total += std::norm(t.coeff);
    }
    out.norm_const = total;
    const double inv = 1.0 / std::sqrt(total);
    for (auto& [l, s] : modes) {
        out.modes.push_back(spinor_scaled(inv, s));
    }
    return out;
}

cplx rel_cs_overlap_closed(int j, int charge, const CSLabel& a, const CSLabel& b, const DiracConfig& dc,
                           const specfun::SeriesControl& ctl) {
    dc.validate();
    const int k0 = rel_cs_first_index(j, charge, dc);
    const double mu = dc.cfg.mu;
    const double nu = order_for(j, k0, mu);
    if (!(nu > -1.0)) {
        throw DomainError("rel_cs_overlap_closed: leading Laguerre order <= -1");
    }
    auto diag = [&](const CSLabel& z) {
        const double u = std::sqrt(std::norm(z.z1));
        const double v = std::sqrt(std::norm(z.z2));
        return j == 0 ? specfun::q_sum(nu, u, v, ctl) : specfun::q_sum(nu, v, u, ctl);
    };
    const double na = diag(a);
    const double nb = diag(b);
    if (na == 0.0 || nb == 0.0) {
        throw DomainError("rel_cs_overlap_closed: label on the zero-amplitude boundary");
    }
    const cplx s1 = std::sqrt(std::conj(a.z1) * b.z1);
    const cplx s2 = std::sqrt(std::conj(a.z2) * b.z2);
    const cplx r = j == 0 ? q_sum_complex(nu, s1, s2, ctl) * overlap_branch_phase(a.z2, b.z2, -mu)
                          : q_sum_complex(nu, s2, s1, ctl) * overlap_branch_phase(a.z1, b.z1, mu);
    return r / std::sqrt(na * nb);
}

cplx rel_cs_overlap_quadrature(const RelCS& a, const RelCS& b, const FieldConfig& cfg) {
    return inner_product_d(a.modes, b.modes, cfg);
}

OperatorFormCheck rel_cs_operator_form(int j, int charge, const CSLabel& a, const CSLabel& b, const DiracConfig& dc,
                                       const GridPtr& grid, const specfun::SeriesControl& ctl) {
    dc.validate();
    const int k0 = rel_cs_first_index(j, charge, dc);
    const CSExpansion ea = cs_expand_range(j, k0, a, dc.cfg.mu, ctl);
    const CSExpansion eb = cs_expand_range(j, k0, b, dc.cfg.mu, ctl);
    // Unnormalized scalar coherent state u_z = Phi_z v_sigma, one spinor per mode.
    auto modes_of = [&](const CSExpansion& e) {
        std::map<int, Spinor2> modes;
        for (const CSTerm& t : e.terms) {
            const int l = t.l + (1 + charge) / 2;
            const Spinor2 u = spinor_scaled(t.coeff, basis_spinor(resolve_rel_qnums(j, l, t.m, charge, dc), dc, grid));
            auto it = modes.find(l);
            if (it == modes.end()) {
                modes.emplace(l, u);
            } else {
                it->second = combine(1.0, it->second, 1.0, u);
            }
        }
        SpinorModes out;
        for (auto& [l, u] : modes) {
            out.push_back(dirac_operator_string(u, dc, charge));
        }
        return out;
    };
    OperatorFormCheck res;
    res.quadrature = inner_product_d(modes_of(ea), modes_of(eb), dc.cfg);
    std::map<std::pair<int, int>, cplx> cb;
    for (const CSTerm& t : eb.terms) {
        cb[{t.l, t.m}] = t.coeff;
    }
    for (const CSTerm& t : ea.terms) {
        const auto it = cb.find({t.l, t.m});
        if (it == cb.end()) {
            continue;
        }
        const RelQuantumNumbers q = resolve_rel_qnums(j, t.l + (1 + charge) / 2, t.m, charge, dc);
        const double e = rel_energy(q, dc);
        const cplx cc = std::conj(t.coeff) * it->second;
        res.spectral += cc * 2.0 * e * (e + dc.mass);
        res.literal += cc * 2.0 * dc.mass * (charge * e + dc.mass);
    }
    return res;
}

Embedded3p1 embed_3p1(const RelQuantumNumbers& q, int charge, int s, double p3, const DiracConfig& dc,
                      const GridPtr& grid) {
    dc.validate();
    check_sign(charge, "charge");
    check_sign(s, "s");
    const double mt = std::hypot(dc.mass, p3);
    if (!(mt > 0.0)) {
        throw DomainError("embed_3p1: spin projection undefined at M = p3 = 0");
    }
    DiracConfig dct = dc;
    dct.mass = mt;
    const int x_charge = s == 1 ? charge : -charge;
    const RelQuantumNumbers qx = resolve_rel_qnums(q.j, q.l, q.m, x_charge, dct);
    const DiracState st = dirac_spinor(qx, dct, x_charge, grid);
    const Spinor2 x = s == 1 ? st.psi : apply_sigma3(st.psi);
    double a = p3 + s * mt + dc.mass;
    double b = p3 + s * mt - dc.mass;
    if (std::hypot(a, b) < 1e-12 * mt) {
        a = p3;
        b = s * mt - dc.mass;
    }
    const double n = std::hypot(a, b);
    Embedded3p1 e;
    e.psi = {spinor_scaled(a / n, x), spinor_scaled(b / n, x)};
    e.energy = charge * std::abs(st.energy);
    e.mass_eff = mt;
    e.s = s;
    e.p3 = p3;
    return e;
}

Spinor4 apply_hamiltonian_3p1(const Spinor4& s, double p3, const DiracConfig& dc) {
    const Spinor2 st = apply_sigma3(s.top);
    const Spinor2 sb = apply_sigma3(s.bottom);
    Spinor4 out;
    out.top = combine(1.0, combine(1.0, apply_sigma_p(s.top, dc), dc.mass, st), p3, sb);
    out.bottom = combine(1.0, combine(1.0, apply_sigma_p(s.bottom, dc), -dc.mass, sb), p3, st);
    return out;
}

double spin_residual_3p1(const Embedded3p1& e, const DiracConfig& dc, double rho_cut) {
    auto sigma_z = [](const Spinor4& x) { return Spinor4{apply_sigma3(x.top), apply_sigma3(x.bottom)}; };
    const Spinor4 hs = apply_hamiltonian_3p1(sigma_z(e.psi), e.p3, dc);
    const Spinor4 sh = sigma_z(apply_hamiltonian_3p1(e.psi, e.p3, dc));
    const double k = 0.5 / e.mass_eff;
    Spinor4 diff;
    diff.top = combine(1.0, combine(k, hs.top, k, sh.top), -e.s, e.psi.top);
    diff.bottom = combine(1.0, combine(k, hs.bottom, k, sh.bottom), -e.s, e.psi.bottom);
    const double num = spinor_norm_sq(diff.top, rho_cut) + spinor_norm_sq(diff.bottom, rho_cut);
    const double den = spinor_norm_sq(e.psi.top, rho_cut) + spinor_norm_sq(e.psi.bottom, rho_cut);
    return std::sqrt(num / den);
}

double energy_residual_3p1(const Embedded3p1& e, const DiracConfig& dc, double rho_cut) {
    const Spinor4 h = apply_hamiltonian_3p1(e.psi, e.p3, dc);
    const Spinor2 dt = combine(1.0, h.top, -e.energy, e.psi.top);
    const Spinor2 db = combine(1.0, h.bottom, -e.energy, e.psi.bottom);
    const double num = spinor_norm_sq(dt, rho_cut) + spinor_norm_sq(db, rho_cut);
    const double den = spinor_norm_sq(e.psi.top, rho_cut) + spinor_norm_sq(e.psi.bottom, rho_cut);
    return std::sqrt(num / den) / std::abs(e.energy);
}

double small_component_ratio(const Embedded3p1& e, const FieldConfig& cfg) {
    const double small = inner_product_perp(e.psi.top.down, e.psi.top.down, cfg).real() +
                         inner_product_perp(e.psi.bottom.up, e.psi.bottom.up, cfg).real();
    return std::sqrt(small / inner_product_d(e.psi, e.psi, cfg).real());
}

double rel_kernel_order(int sigma, int l, const DiracConfig& dc) {
    dc.validate();
    check_sign(sigma, "sigma");
    const double mu = dc.cfg.mu;
    if (l != 0) {
        return std::abs(l - (1 + sigma) / 2 + mu);
    }
    const double half = (1 + sigma) / 2;
    return dc.vartheta == 1 ? half - mu : mu - half;
}

Matrix2 green_kernel_rel(int sigma, int l, const DiracConfig& dc, cplx s, double dtheta, double dt, double rho,
                         double rho_p) {
    const double order = rel_kernel_order(sigma, l, dc);
    if (!(order > -1.0)) {
        throw DomainError("green_kernel_rel: Bessel order <= -1 (state absent at this flux)");
    }
    if (rho < 0.0 || rho_p < 0.0) {
        throw DomainError("green_kernel_rel: rho must be >= 0");
    }
    const double g = dc.cfg.gamma;
    const cplx sn = std::sin(g * s);
    if (std::abs(s) < 1e-300 || std::abs(sn) < 1e-14) {
        throw SingularityError("green_kernel_rel: s at a singular point k pi / gamma");
    }
    const cplx i(0.0, 1.0);
    const int ls = l - (1 + sigma) / 2;
    const cplx z = -i * std::sqrt(rho * rho_p) / sn;
    const cplx expo = i * kPi / 4.0 - i * dc.mass * dc.mass * s + i * double(ls - dc.cfg.l0) * dtheta -
                      i * (ls + sigma + dc.cfg.mu) * g * s - i * dt * dt / (4.0 * s) +
                      0.5 * i * (rho + rho_p) * std::cos(g * s) / sn + std::abs(z.real());
    const cplx f = g / (8.0 * std::pow(kPi, 1.5) * std::sqrt(s) * sn) * std::exp(expo) *
                   specfun::bessel_i_scaled(order, z);
    Matrix2 out{0.0, 0.0, 0.0, 0.0};
    out[sigma == 1 ? 0 : 3] = f;
    return out;
}

double kernel_rel_smearing_error(int sigma, int l, const DiracConfig& dc, double tau, double rho, double g_center,
                                 double g_width) {
    if (!(tau > 0.0)) {
        throw DomainError("kernel_rel_smearing_error: tau must be positive");
    }
    const cplx s(0.0, -tau);
    const cplx t = std::polar(1.0, kPi / 4.0) / (8.0 * std::pow(kPi, 1.5) * std::sqrt(s));
    const int slot = sigma == 1 ? 0 : 3;
    auto gfun = [&](double x) {
        const double d = (x - g_center) / g_width;
        return std::exp(-0.5 * d * d);
    };
    // At dt = dtheta = 0 on the Wick axis f / T is purely imaginary.
    auto integrand = [&](double x) {
        return (green_kernel_rel(sigma, l, dc, s, 0.0, 0.0, rho, x)[slot] / t).imag() * gfun(x);
    };
    const double lo = std::max(0.0, g_center - 12.0 * g_width);
    const double hi = g_center + 12.0 * g_width;
    const double mid = std::clamp(rho, lo, hi);
    double val = 0.0;
    for (auto [a, b] : {std::pair{lo, mid}, std::pair{mid, hi}}) {
        if (b > a) {
            val += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-11);
        }
    }
    const double target = 2.0 * dc.cfg.gamma * gfun(rho);
    return std::abs(val - target) / (2.0 * dc.cfg.gamma);
}

}  // namespace msf
