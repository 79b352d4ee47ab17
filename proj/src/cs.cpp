#include "msf/cs.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

#include "msf/errors.hpp"

namespace msf {

using specfun::SeriesControl;

cplx principal_pow(cplx z, double n) {
    if (n == 0.0) {
        return 1.0;
    }
    if (z == cplx(0.0, 0.0)) {
        if (n > 0.0) {
            return 0.0;
        }
        throw SingularityError("principal_pow: 0 raised to a negative power");
    }
    return std::exp(n * std::log(z));
}

cplx overlap_branch_phase(cplx za, cplx zb, double frac) {
    if (za == cplx(0.0, 0.0) || zb == cplx(0.0, 0.0) || frac == 0.0) {
        return 1.0;
    }
    const double split = std::conj(std::log(za)).imag() + std::log(zb).imag();
    const double wind = std::round((split - std::arg(std::conj(za) * zb)) / (2.0 * std::numbers::pi));
    return std::polar(1.0, 2.0 * std::numbers::pi * wind * frac);
}

namespace {

double order_of(int j, int l, double mu) {
    return j == 0 ? -l - mu : l + mu;
}

std::pair<double, double> powers(int j, int l, int m, double mu) {
    if (j == 0) {
        return {static_cast<double>(m), m - l - mu};
    }
    return {m + l + mu, static_cast<double>(m)};
}

double log_abs_pow(double r, double n) {
    if (n == 0.0) {
        return 0.0;
    }
    return r == 0.0 ? -std::numeric_limits<double>::infinity() : n * std::log(r);
}

cplx coefficient(const CSLabel& z, double n1, double n2) {
    const double lm = log_abs_pow(std::abs(z.z1), n1) + log_abs_pow(std::abs(z.z2), n2) -
                      0.5 * (std::lgamma(1.0 + n1) + std::lgamma(1.0 + n2));
    if (lm == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    const double ph = (n1 == 0.0 ? 0.0 : n1 * std::arg(z.z1)) + (n2 == 0.0 ? 0.0 : n2 * std::arg(z.z2));
    return std::polar(std::exp(lm), ph);
}

// Appends the m-sum of one angular number; returns the block's sum |c|^2.
double append_block(int j, int l, const CSLabel& z, double mu, const SeriesControl& ctl, double total,
                    std::vector<CSTerm>& out) {
    const double uv = std::norm(z.z1) * std::norm(z.z2);
    double block = 0.0;
    for (long m = 0;; ++m) {
        if (m >= ctl.max_terms) {
            throw TruncationError("coherent state: m-sum did not converge", m, 1.0);
        }
        const auto [n1, n2] = powers(j, l, static_cast<int>(m), mu);
        CSTerm t;
        t.l = l;
        t.m = static_cast<int>(m);
        t.n1 = n1;
        t.n2 = n2;
        t.coeff = coefficient(z, n1, n2);
        out.push_back(t);
        const double c2 = std::norm(t.coeff);
        block += c2;
        const double q = uv / ((n1 + 1.0) * (n2 + 1.0));
        // Tolerances act on amplitudes, hence rel_tol^2 on the squared sums.
        if (q < 1.0 && c2 * q / (1.0 - q) <= ctl.rel_tol * ctl.rel_tol * (total + block)) {
            break;
        }
    }
    return block;
}

cplx radial_phase(int j, int l) {
    return (j == 1 && l % 2 != 0) ? -1.0 : 1.0;
}

// sum_m c_m phi_{l,m}(rho) for the consecutive terms [begin, end) sharing l.
cplx block_value(const CSExpansion& e, std::size_t begin, std::size_t end, double rho, double mu) {
    const int l = e.terms[begin].l;
    const int m_max = e.terms[end - 1].m;
    const std::vector<double> f = specfun::laguerre_fn_table(m_max, order_of(e.j, l, mu), rho);
    cplx acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        acc += e.terms[k].coeff * f[static_cast<std::size_t>(e.terms[k].m)];
    }
    return acc * radial_phase(e.j, l);
}

template <class F>
void for_each_block(const CSExpansion& e, F&& fn) {
    std::size_t begin = 0;
    while (begin < e.terms.size()) {
        std::size_t end = begin;
        while (end < e.terms.size() && e.terms[end].l == e.terms[begin].l) {
            ++end;
        }
        fn(begin, end);
        begin = end;
    }
}

// Unnormalized sum_{l,m} c phi at a point.
cplx expansion_value(const CSExpansion& e, double theta, double rho, const FieldConfig& cfg) {
    cplx acc = 0.0;
    for_each_block(e, [&](std::size_t b, std::size_t en) {
        const int l = e.terms[b].l;
        acc += std::polar(1.0, (l - cfg.l0) * theta) * block_value(e, b, en, rho, cfg.mu);
    });
    return state_norm(cfg) * acc;
}

}  // namespace

CSExpansion cs_expand_range(int j, int l_start, const CSLabel& label, double mu, const SeriesControl& ctl) {
    ctl.validate();
    if (j != 0 && j != 1) {
        throw DomainError("coherent state: branch must be 0 or 1");
    }
    if (!(mu >= 0.0 && mu < 1.0)) {
        throw DomainError("coherent state: mu must lie in [0, 1)");
    }
    const double a0 = order_of(j, l_start, mu);
    if (!(a0 > -1.0)) {
        throw DomainError("coherent state: Laguerre order at the first angular number is <= -1");
    }
    CSExpansion e;
    e.j = j;
    e.label = label;
    e.truncation = ctl;

    // The lowest power of the vanishing label is a0 at (l_start, m = 0).
    const cplx zero_side = j == 0 ? label.z2 : label.z1;
    if (zero_side == cplx(0.0, 0.0) && a0 > 0.0) {
        const auto [n1, n2] = powers(j, l_start, 0, mu);
        e.terms.push_back({l_start, 0, n1, n2, cplx(1.0, 0.0)});
        e.norm_const = 1.0;
        e.limit = true;
        return e;
    }

    const int step = j == 0 ? -1 : 1;
    double total = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int small = 0;
    for (long count = 0;; ++count) {
        if (count >= ctl.max_terms) {
            throw TruncationError("coherent state: l-sum did not converge", count, prev / total);
        }
        const int l = l_start + step * static_cast<int>(count);
        const double block = append_block(j, l, label, mu, ctl, total, e.terms);
        total += block;
        small = (block <= ctl.rel_tol * ctl.rel_tol * total && block <= prev) ? small + 1 : 0;
        prev = block;
        if (small >= 3) {
            break;
        }
    }
    e.norm_const = total;
    return e;
}

CSExpansion cs_expand(int j, const CSLabel& label, double mu, const SeriesControl& ctl) {
    return cs_expand_range(j, j == 0 ? -1 : 0, label, mu, ctl);
}

CSExpansion cs_branch(int j, int l, const CSLabel& label, double mu, const SeriesControl& ctl) {
    ctl.validate();
    if ((j == 0 && l >= 0) || (j == 1 && l < 0) || (j != 0 && j != 1)) {
        throw DomainError("cs_branch: l outside the branch domain");
    }
    CSExpansion e;
    e.j = j;
    e.label = label;
    e.truncation = ctl;
    e.norm_const = append_block(j, l, label, mu, ctl, 0.0, e.terms);
    return e;
}

cplx cs_state(int j, const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
              const SeriesControl& ctl) {
    cfg.validate();
    const CSExpansion e = cs_expand(j, label, cfg.mu, ctl);
    return expansion_value(e, theta, rho, cfg) / std::sqrt(e.norm_const);
}

std::vector<GridFunction> cs_sample(const CSExpansion& e, const GridPtr& grid, const FieldConfig& cfg) {
    std::vector<GridFunction> out;
    const double scale = state_norm(cfg) / std::sqrt(e.norm_const);
    for_each_block(e, [&](std::size_t b, std::size_t en) {
        GridFunction f;
        f.grid = grid;
        f.angular = e.terms[b].l - cfg.l0;
        f.values.resize(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) {
            f.values[i] = scale * block_value(e, b, en, grid->nodes()[i], cfg.mu);
        }
        out.push_back(std::move(f));
    });
    return out;
}

double cs_normalization(int j, double u, double v, double mu, const SeriesControl& ctl) {
    if (!(u >= 0.0) || !(v >= 0.0)) {
        throw DomainError("cs_normalization: u and v must be >= 0");
    }
    if (j == 0) {
        return specfun::q_sum(1.0 - mu, std::sqrt(u), std::sqrt(v), ctl);
    }
    if (j == 1) {
        return specfun::q_sum(mu, std::sqrt(v), std::sqrt(u), ctl);
    }
    throw DomainError("cs_normalization: branch must be 0 or 1");
}

cplx q_sum_complex(double nu, cplx a, cplx b, const SeriesControl& ctl) {
    ctl.validate();
    if (!(nu > -1.0)) {
        throw DomainError("q_sum_complex: order must be > -1");
    }
    if (b == cplx(0.0, 0.0)) {
        return nu == 0.0 ? 1.0 : 0.0;
    }
    cplx sum = 0.0;
    int quiet = 0;
    if (a == cplx(0.0, 0.0)) {
        const cplx lb = std::log(b);
        for (long l = 0; l < ctl.max_terms; ++l) {
            const cplx t = std::exp(2.0 * (nu + l) * lb - std::lgamma(nu + l + 1.0));
            sum += t;
            const bool decaying = std::norm(b) < nu + l + 1.0;
            quiet = (decaying && std::abs(t) <= ctl.rel_tol * std::abs(sum)) ? quiet + 1 : 0;
            if (quiet >= 2) {
                return sum;
            }
        }
        throw TruncationError("q_sum_complex: no convergence at a = 0", ctl.max_terms, 1.0);
    }
    const cplx x = 2.0 * a * b;
    const cplx lr = std::log(b / a);
    for (long l = 0; l < ctl.max_terms; ++l) {
        const cplx t = std::exp((nu + l) * lr) * specfun::bessel_i(nu + l, x);
        sum += t;
        const bool decaying = nu + l > std::abs(x) && std::abs(b / a) * std::abs(x) < 2.0 * (nu + l + 1.0);
        quiet = (decaying && std::abs(t) <= ctl.rel_tol * std::abs(sum)) ? quiet + 1 : 0;
        if (quiet >= 2) {
            return sum;
        }
    }
    throw TruncationError("q_sum_complex: tail above rel_tol within max_terms", ctl.max_terms, 1.0);
}

cplx cs_overlap(int ja, const CSLabel& a, int jb, const CSLabel& b, double mu, const SeriesControl& ctl) {
    if (ja != jb) {
        return 0.0;
    }
    const int j = ja;
    const double na = cs_normalization(j, std::norm(a.z1), std::norm(a.z2), mu, ctl);
    const double nb = cs_normalization(j, std::norm(b.z1), std::norm(b.z2), mu, ctl);
    if (na == 0.0 || nb == 0.0) {
        return cs_overlap_contraction(j, a, b, mu, ctl);
    }
    const cplx s1 = std::sqrt(std::conj(a.z1) * b.z1);
    const cplx s2 = std::sqrt(std::conj(a.z2) * b.z2);
    const cplx r = j == 0 ? q_sum_complex(1.0 - mu, s1, s2, ctl) * overlap_branch_phase(a.z2, b.z2, -mu)
                          : q_sum_complex(mu, s2, s1, ctl) * overlap_branch_phase(a.z1, b.z1, mu);
    return r / std::sqrt(na * nb);
}

cplx cs_overlap_contraction(int j, const CSLabel& a, const CSLabel& b, double mu, const SeriesControl& ctl) {
    const CSExpansion ea = cs_expand(j, a, mu, ctl);
    const CSExpansion eb = cs_expand(j, b, mu, ctl);
    std::map<std::pair<int, int>, cplx> cb;
    for (const CSTerm& t : eb.terms) {
        cb[{t.l, t.m}] = t.coeff;
    }
    cplx acc = 0.0;
    for (const CSTerm& t : ea.terms) {
        const auto it = cb.find({t.l, t.m});
        if (it != cb.end()) {
            acc += std::conj(t.coeff) * it->second;
        }
    }
    return acc / std::sqrt(ea.norm_const * eb.norm_const);
}

cplx mm_superpose(const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
                  const SeriesControl& ctl) {
    cfg.validate();
    if (cfg.mu != 0.0 || cfg.l0 != 0) {
        throw DomainError("mm_superpose: requires zero flux (mu = 0, l0 = 0)");
    }
    cplx acc = 0.0;
    for (int j : {0, 1}) {
        const CSExpansion e = cs_expand(j, label, 0.0, ctl);
        if (!e.limit) {
            acc += expansion_value(e, theta, rho, cfg);
        }
    }
    return acc;
}

namespace {

// I_{n,m}(rho) = sqrt(n! m!) e^{-rho/2} (-1)^m sum_p (-1)^p rho^{(n+m)/2-p} / (p! (n-p)! (m-p)!).
long double landau_radial_explicit(int n, int m, long double rho) {
    long double acc = 0.0L;
    const int pmax = std::min(n, m);
    for (int p = 0; p <= pmax; ++p) {
        const long double e = 0.5L * (n + m) - p;
        const long double lt = 0.5L * (std::lgamma(n + 1.0L) + std::lgamma(m + 1.0L)) - std::lgamma(p + 1.0L) -
                               std::lgamma(n - p + 1.0L) - std::lgamma(m - p + 1.0L) - 0.5L * rho;
        const long double pw = e == 0.0L ? 1.0L : std::pow(rho, e);
        acc += (p % 2 == 0 ? 1.0L : -1.0L) * pw * std::exp(lt);
    }
    return (m % 2 == 0 ? 1.0L : -1.0L) * acc;
}

int series_cutoff(double r, const SeriesControl& ctl) {
    const double target = std::log(ctl.rel_tol) - 8.0;
    int k = 0;
    while (k < r * r + 2.0 || log_abs_pow(r, k) - 0.5 * std::lgamma(k + 1.0) > target) {
        if (r == 0.0 && k >= 1) {
            break;
        }
        ++k;
    }
    return k;
}

}  // namespace

cplx mm_double_series(const CSLabel& label, double theta, double rho, const FieldConfig& cfg,
                      const SeriesControl& ctl) {
    cfg.validate();
    if (cfg.mu != 0.0 || cfg.l0 != 0) {
        throw DomainError("mm_double_series: requires zero flux (mu = 0, l0 = 0)");
    }
    const int r1max = series_cutoff(std::abs(label.z1), ctl);
    const int r2max = series_cutoff(std::abs(label.z2), ctl);
    cplx acc = 0.0;
    for (int r1 = 0; r1 <= r1max; ++r1) {
        for (int r2 = 0; r2 <= r2max; ++r2) {
            const cplx c = principal_pow(label.z1, r1) * principal_pow(label.z2, r2) /
                           std::sqrt(std::tgamma(r1 + 1.0) * std::tgamma(r2 + 1.0));
            const int l = r1 - r2;
            const double rad = static_cast<double>(landau_radial_explicit(r1, r2, rho));
            acc += c * std::polar(1.0, l * theta) * ((l % 2 == 0) ? 1.0 : -1.0) * rad;
        }
    }
    return state_norm(cfg) * acc;
}

double mm_weight_sum(double u, double v) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return (specfun::q_sum_scaled(1.0, std::sqrt(u), std::sqrt(v)) +
            specfun::q_sum_scaled(0.0, std::sqrt(v), std::sqrt(u))) / pi2;
}

}  // namespace msf
