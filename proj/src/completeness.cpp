#include "msf/completeness.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "msf/errors.hpp"
#include "msf/grid.hpp"

namespace msf {

namespace {

constexpr double kPi = std::numbers::pi;

void check_branch(int j) {
    if (j != 0 && j != 1) {
        throw DomainError("branch must be 0 or 1");
    }
}

void check_uv(double u, double v) {
    if (!(u >= 0.0) || !(v >= 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
        throw DomainError("weights: u and v must be finite and >= 0");
    }
}

// e^{-(u+v)} N_j(u, v).
double norm_scaled(int j, double u, double v, double mu, const specfun::SeriesControl& ctl) {
    return j == 0 ? specfun::q_sum_scaled(1.0 - mu, std::sqrt(u), std::sqrt(v), ctl)
                  : specfun::q_sum_scaled(mu, std::sqrt(v), std::sqrt(u), ctl);
}

// Exponents of u = |z1|^2 and v = |z2|^2 carried by the amplitude of (l, m).
std::pair<double, double> uv_powers(int m, int l, double mu, int j) {
    return j == 0 ? std::pair<double, double>{m, m - l - mu} : std::pair<double, double>{m + l + mu, m};
}

void check_pair(int l, int m, int j) {
    check_branch(j);
    if ((j == 0 && l >= 0) || (j == 1 && l < 0) || m < 0) {
        throw DomainError("g_matrix: (l, m) outside the branch domain");
    }
}

// (W_j / N_j) pi^2 e^{u+v} on the product rule, which is 1 analytically.
struct WeightTable {
    Quadrature qu;
    Quadrature qv;
    std::vector<double> ratio;  // row-major in (u, v)
};

WeightTable weight_table(double mu, int j, int nodes, const specfun::SeriesControl& ctl) {
    // Fractional parts of the exponents become the Laguerre weights; the
    // integer parts stay in the integrand as polynomials.
    const double au = j == 0 ? 0.0 : mu;
    const double av = j == 0 ? (mu == 0.0 ? 0.0 : 1.0 - mu) : 0.0;
    WeightTable t{make_quadrature(au, nodes), make_quadrature(av, nodes), {}};
    t.ratio.resize(t.qu.size() * t.qv.size());
    const WeightSpec spec{j, mu};
    for (std::size_t a = 0; a < t.qu.size(); ++a) {
        for (std::size_t b = 0; b < t.qv.size(); ++b) {
            const double u = t.qu.nodes[a];
            const double v = t.qv.nodes[b];
            t.ratio[a * t.qv.size() + b] = kPi * kPi * weight_fn(spec, u, v, ctl) / norm_scaled(j, u, v, mu, ctl);
        }
    }
    return t;
}

double g_from_table(const WeightTable& t, int m, int l, double mu, int j) {
    const auto [pu, pv] = uv_powers(m, l, mu, j);
    const double iu = std::round(pu - t.qu.a);
    const double iv = std::round(pv - t.qv.a);
    double acc = 0.0;
    for (std::size_t a = 0; a < t.qu.size(); ++a) {
        const double fu = t.qu.weights[a] * std::pow(t.qu.nodes[a], iu);
        for (std::size_t b = 0; b < t.qv.size(); ++b) {
            acc += fu * t.qv.weights[b] * std::pow(t.qv.nodes[b], iv) * t.ratio[a * t.qv.size() + b];
        }
    }
    return acc;
}

}  // namespace

double weight_fn(const WeightSpec& spec, double u, double v, const specfun::SeriesControl& ctl) {
    check_branch(spec.j);
    check_uv(u, v);
    if (!(spec.mu >= 0.0 && spec.mu < 1.0)) {
        throw DomainError("weight_fn: mu must lie in [0, 1)");
    }
    return norm_scaled(spec.j, u, v, spec.mu, ctl) / (kPi * kPi);
}

double weight_half_closed(int j, double u, double v) {
    check_branch(j);
    check_uv(u, v);
    const double a = std::sqrt(u);
    const double b = std::sqrt(v);
    const double sgn = j == 0 ? -1.0 : 1.0;
    return (specfun::erf(a + b) + sgn * specfun::erf(a - b)) / (2.0 * kPi * kPi);
}

MomentResult moment_check(double n) {
    if (!(n > -1.0) || !std::isfinite(n)) {
        throw DomainError("moment_check: n must be > -1");
    }
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [n](double x) { return x > 0.0 ? std::exp(n * std::log(x) - x) : 0.0; };
    MomentResult r;
    r.quadrature_value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-15);
    r.gamma_value = std::exp(specfun::ln_gamma(1.0 + n));
    r.abs_err = std::abs(r.quadrature_value - r.gamma_value);
    return r;
}

double g_closed(int m, int l, double mu, int j) {
    const auto [pu, pv] = uv_powers(m, l, mu, j);
    return std::exp(specfun::ln_gamma(1.0 + pu) + specfun::ln_gamma(1.0 + pv));
}

double g_matrix(int m, int n, int l, int k, double mu, int j, int nodes, const specfun::SeriesControl& ctl) {
    check_pair(l, m, j);
    check_pair(k, n, j);
    if (m != n || l != k) {
        return 0.0;
    }
    return g_from_table(weight_table(mu, j, nodes, ctl), m, l, mu, j);
}

std::vector<std::vector<double>> unity_reconstruction(const std::vector<std::pair<int, int>>& basis,
                                                      double mu, int j, int nodes,
                                                      const specfun::SeriesControl& ctl) {
    for (const auto& [l, m] : basis) {
        check_pair(l, m, j);
    }
    const WeightTable t = weight_table(mu, j, nodes, ctl);
    const std::size_t n = basis.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (basis[a] != basis[b]) {
                continue;  // angular integrals vanish
            }
            const auto [l, m] = basis[a];
            // |Phi><Phi| carries 1/N_j and the amplitudes' 1/sqrt(Gamma Gamma) twice.
            out[a][b] = g_from_table(t, m, l, mu, j) / g_closed(m, l, mu, j);
        }
    }
    return out;
}

cplx propagator_closed(const KernelParams& p, double dtheta, double rho, double rho_p) {
    p.cfg.validate();
    check_branch(p.j);
    if ((p.j == 0 && p.l >= 0) || (p.j == 1 && p.l < 0)) {
        throw DomainError("propagator: l outside the branch domain");
    }
    if (p.delta_t.imag() > 0.0) {
        throw DomainError("propagator: Im delta_t must be <= 0");
    }
    if (rho < 0.0 || rho_p < 0.0) {
        throw DomainError("propagator: rho must be >= 0");
    }
    const double g = p.cfg.gamma;
    const double nu = p.l + p.cfg.mu;
    const cplx arg = 0.5 * g * p.delta_t;
    const cplx s = std::sin(arg);
    if (std::abs(s) < 1e-14) {
        throw SingularityError("propagator: sin(gamma delta_t / 2) = 0");
    }
    const cplx i(0.0, 1.0);
    const cplx z = std::sqrt(rho * rho_p) / (i * s);
    const double order = p.j == 0 ? -nu : nu;
    const cplx expo = i * ((p.l - p.cfg.l0) * dtheta) - i * (0.5 * g * nu) * p.delta_t +
                      0.5 * i * (rho + rho_p) * std::cos(arg) / s + std::abs(z.real());
    return g / (4.0 * kPi) * std::exp(expo) / s * specfun::bessel_i_scaled(order, z);
}

cplx propagator_series(const KernelParams& p, double dtheta, double rho, double rho_p,
                       const specfun::SeriesControl& ctl) {
    p.cfg.validate();
    ctl.validate();
    const QuantumNumbers q0 = resolve_qnums(p.j, p.l, 0, p.cfg);
    if (!(p.delta_t.imag() < 0.0)) {
        throw DomainError("propagator_series: the mode sum converges only for Im delta_t < 0");
    }
    const double g = p.cfg.gamma;
    const double alpha = q0.alpha();
    const cplx i(0.0, 1.0);
    const double tau = -p.delta_t.imag();
    const double n2 = g / (2.0 * kPi);
    const cplx pre = i * n2 * std::polar(1.0, (p.l - p.cfg.l0) * dtheta);
    long m_max = 64;
    for (;;) {
        if (m_max > ctl.max_terms) {
            throw TruncationError("propagator_series: mode sum did not converge", m_max, 1.0);
        }
        const int mm = static_cast<int>(m_max);
        const std::vector<double> a = specfun::laguerre_fn_table(mm, alpha, rho);
        const std::vector<double> b = specfun::laguerre_fn_table(mm, alpha, rho_p);
        cplx acc = 0.0;
        for (int m = 0; m <= mm; ++m) {
            const double e = g * (q0.n1 + m + 0.5);
            acc += std::exp(-i * e * p.delta_t) * a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
        }
        // |I_{m+alpha,m}| <= 1 for alpha >= 0 bounds the remaining terms.
        const double e_next = g * (q0.n1 + m_max + 1.5);
        const double tail = std::exp(-e_next * tau) / (1.0 - std::exp(-g * tau));
        if (tail <= ctl.rel_tol * std::abs(acc)) {
            return pre * acc;
        }
        m_max *= 2;
    }
}

double propagator_smearing_error(int j, int l, const FieldConfig& cfg, double tau, double rho,
                                 double g_center, double g_width) {
    if (!(tau > 0.0)) {
        throw DomainError("propagator_smearing_error: tau must be positive");
    }
    KernelParams p;
    p.j = j;
    p.l = l;
    p.cfg = cfg;
    p.delta_t = cplx(0.0, -tau);
    auto gfun = [&](double x) {
        const double d = (x - g_center) / g_width;
        return std::exp(-0.5 * d * d);
    };
    // On the Wick axis the kernel at dtheta = 0 is i times a real function.
    auto integrand = [&](double x) { return propagator_closed(p, 0.0, rho, x).imag() * gfun(x); };
    const double lo = std::max(0.0, g_center - 12.0 * g_width);
    const double hi = g_center + 12.0 * g_width;
    // Split at rho, where the kernel peaks.
    double val = 0.0;
    const double mid = std::clamp(rho, lo, hi);
    for (auto [a, b] : {std::pair{lo, mid}, std::pair{mid, hi}}) {
        if (b > a) {
            val += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-11);
        }
    }
    const double target = cfg.gamma / (2.0 * kPi) * gfun(rho);
    return std::abs(val - target) / (cfg.gamma / (2.0 * kPi));
}

}  // namespace msf
