#include "msf/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "msf/errors.hpp"

namespace msf::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && std::floor(x) == x;
}

// Stirling series for |w| >= 10, Re w > 0.
cplx stirling_ln_gamma(cplx w) {
    static constexpr std::array<double, 8> kCoef = {
        1.0 / 12.0,         -1.0 / 360.0,        1.0 / 1260.0,     -1.0 / 1680.0,
        1.0 / 1188.0,       -691.0 / 360360.0,   1.0 / 156.0,      -3617.0 / 122400.0};
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx corr = 0.0;
    cplx p = inv;
    for (double c : kCoef) {
        corr += c * p;
        p *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + corr;
}

}  // namespace

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
        throw UsageError("SeriesControl: rel_tol must be positive");
    }
    if (max_terms < 1) {
        throw UsageError("SeriesControl: max_terms must be >= 1");
    }
}

double ln_gamma(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("ln_gamma: non-finite argument");
    }
    if (x <= 0.0) {
        throw DomainError("ln_gamma(real): argument must be positive, got " + std::to_string(x));
    }
    return std::lgamma(x);
}

cplx ln_gamma(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("ln_gamma: non-finite argument");
    }
    if (z.imag() == 0.0 && is_nonpositive_integer(z.real())) {
        throw SingularityError("ln_gamma: pole at " + std::to_string(z.real()));
    }
    if (z.imag() == 0.0 && z.real() > 0.0) {
        return {std::lgamma(z.real()), 0.0};
    }
    // Shift up with a sum of principal logs; this follows the analytic
    // log-gamma continuously away from the negative real axis.
    cplx shift = 0.0;
    cplx w = z;
    while (w.real() < 10.0 || std::abs(w) < 10.0) {
        shift += std::log(w);
        w += 1.0;
    }
    return stirling_ln_gamma(w) - shift;
}

double laguerre_poly(int m, double alpha, double rho) {
    if (m < 0) {
        throw DomainError("laguerre_poly: m must be >= 0");
    }
    if (!(alpha > -1.0)) {
        throw DomainError("laguerre_poly: alpha must be > -1");
    }
    if (rho < 0.0) {
        throw DomainError("laguerre_poly: rho must be >= 0");
    }
    if (m == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = 1.0 + alpha - rho;
    for (int k = 1; k < m; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - rho) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre_fn_alpha(int m, double alpha, double rho) {
    if (m < 0) {
        throw DomainError("laguerre_fn: m must be >= 0");
    }
    if (!(alpha > -1.0) || !std::isfinite(alpha)) {
        throw DomainError("laguerre_fn: order n - m must be > -1, got " + std::to_string(alpha));
    }
    if (rho < 0.0 || !std::isfinite(rho)) {
        throw DomainError("laguerre_fn: rho must be finite and >= 0");
    }
    if (rho == 0.0) {
        if (alpha > 0.0) {
            return 0.0;
        }
        if (alpha < 0.0) {
            throw SingularityError("laguerre_fn: profile diverges at rho = 0 for negative order");
        }
        // alpha = 0: L_m^0(0) = 1 and the normalization is 1.
        return 1.0;
    }

    // f_k = sqrt(k!/Gamma(k+alpha+1)) e^{-rho/2} rho^{alpha/2} L_k^alpha(rho),
    // tracked as cur * exp(log_scale).
    constexpr double kBig = 1e200;
    const double log_big = std::log(kBig);
    double log_scale = -0.5 * rho + 0.5 * alpha * std::log(rho) - 0.5 * std::lgamma(1.0 + alpha);
    double prev = 0.0;
    double cur = 1.0;
    for (int k = 0; k < m; ++k) {
        const double a = (2.0 * k + 1.0 + alpha - rho);
        const double b = k == 0 ? 0.0 : std::sqrt(k * (k + alpha));
        const double next = (a * cur - b * prev) / std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            log_scale += log_big;
        }
    }
    if (cur == 0.0) {
        return 0.0;
    }
    const double log_mag = std::log(std::abs(cur)) + log_scale;
    if (log_mag < -745.0) {
        return 0.0;
    }
    return std::copysign(std::exp(log_mag), cur);
}

std::vector<double> laguerre_fn_table(int m_max, double alpha, double rho) {
    if (m_max < 0) {
        return {};
    }
    std::vector<double> out(static_cast<std::size_t>(m_max) + 1);
    if (rho == 0.0) {
        for (int k = 0; k <= m_max; ++k) {
            out[static_cast<std::size_t>(k)] = laguerre_fn_alpha(k, alpha, rho);
        }
        return out;
    }
    laguerre_fn_alpha(0, alpha, rho);  // domain checks
    constexpr double kBig = 1e200;
    double log_scale = -0.5 * rho + 0.5 * alpha * std::log(rho) - 0.5 * std::lgamma(1.0 + alpha);
    double prev = 0.0;
    double cur = 1.0;
    for (int k = 0;; ++k) {
        out[static_cast<std::size_t>(k)] = cur * std::exp(log_scale);
        if (k == m_max) {
            break;
        }
        const double b = k == 0 ? 0.0 : std::sqrt(k * (k + alpha));
        const double next =
            ((2.0 * k + 1.0 + alpha - rho) * cur - b * prev) / std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            log_scale += std::log(kBig);
        }
    }
    return out;
}

double laguerre_fn(double n, int m, double rho) {
    return laguerre_fn_alpha(m, n - m, rho);
}

namespace {

// I_nu(z) represented as mant * exp(expo) to keep large arguments finite.
struct Scaled {
    std::complex<long double> mant;
    long double expo;
};

Scaled bessel_series(double nu, cplx z) {
    using ld = long double;
    using lc = std::complex<ld>;
    const lc zl(z.real(), z.imag());
    // t_0 = (z/2)^nu / Gamma(nu+1), with the sign of Gamma carried separately.
    int gsign = 1;
    const ld lg = ::lgammal_r(static_cast<ld>(nu) + 1.0L, &gsign);
    const lc log_t0 = static_cast<ld>(nu) * std::log(zl / 2.0L) - lg;
    const lc q = zl * zl / 4.0L;
    constexpr ld kRescale = 1e300L;
    lc term = 1.0L;
    lc sum = 1.0L;
    ld extra = 0.0L;
    for (long k = 0; k < 200000; ++k) {
        const ld denom = (k + 1.0L) * (k + 1.0L + nu);
        term *= q / denom;
        sum += term;
        if (std::abs(sum) > kRescale) {
            sum /= kRescale;
            term /= kRescale;
            extra += std::log(kRescale);
        }
        const bool decaying = (k + 1.0L) * (k + 1.0L + nu) > std::abs(q);
        if (decaying && std::abs(term) <= 1e-21L * std::abs(sum)) {
            break;
        }
    }
    Scaled out;
    out.mant = sum * std::exp(lc(0.0L, log_t0.imag())) * static_cast<ld>(gsign);
    out.expo = log_t0.real() + extra;
    return out;
}

// Hankel expansion for Re z >= 0, large |z|. Returns false if the
// asymptotic sum does not reach double precision before diverging.
bool bessel_hankel_scaled(double nu, cplx z, cplx& out) {
    const double mu4 = 4.0 * nu * nu;
    cplx s1 = 1.0;
    cplx s2 = 1.0;
    cplx ak = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    bool ok = false;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        ak *= (mu4 - odd * odd) / (k * 8.0) / z;
        const double mag = std::abs(ak);
        if (mag > prev) {
            break;
        }
        s1 += (k % 2 == 0 ? 1.0 : -1.0) * ak;
        s2 += ak;
        prev = mag;
        if (mag < 1e-17 * std::abs(s1)) {
            ok = true;
            break;
        }
    }
    if (!ok) {
        return false;
    }
    const cplx root = std::sqrt(2.0 * kPi * z);
    const cplx iy(0.0, z.imag());
    out = std::exp(iy) / root * s1;
    if (z.imag() != 0.0) {
        const double sgn = z.imag() > 0.0 ? 1.0 : -1.0;
        const cplx rot = std::exp(cplx(0.0, sgn * kPi * (nu + 0.5)));
        out += rot * std::exp(-2.0 * z.real() - iy) / root * s2;
    }
    return true;
}

// e^{-|Re z|} I_nu(z) for Re z >= 0.
cplx bessel_scaled_right(double nu, cplx z) {
    if (std::abs(z) >= 20.0) {
        cplx h;
        if (bessel_hankel_scaled(nu, z, h)) {
            return h;
        }
    }
    const Scaled s = bessel_series(nu, z);
    const long double e = s.expo - static_cast<long double>(z.real());
    const std::complex<long double> v = s.mant * std::exp(e);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

void check_bessel_args(double nu, cplx z) {
    if (!std::isfinite(nu) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("bessel_i: non-finite argument");
    }
}

}  // namespace

cplx bessel_i_scaled(double nu, cplx z) {
    check_bessel_args(nu, z);
    if (nu < 0.0 && std::floor(nu) == nu) {
        nu = -nu;  // I_{-n} = I_n
    }
    if (z == cplx(0.0, 0.0)) {
        if (nu == 0.0) {
            return 1.0;
        }
        if (nu > 0.0) {
            return 0.0;
        }
        throw SingularityError("bessel_i: negative non-integer order at z = 0");
    }
    if (z.real() >= 0.0) {
        return bessel_scaled_right(nu, z);
    }
    // I_nu(-w) = e^{+-i pi nu} I_nu(w); the sign follows Im z to stay on the principal branch.
    const double sgn = z.imag() >= 0.0 ? 1.0 : -1.0;
    return std::exp(cplx(0.0, sgn * kPi * nu)) * bessel_scaled_right(nu, -z);
}

double bessel_i_scaled(double nu, double x) {
    if (x < 0.0 && std::floor(nu) != nu) {
        throw DomainError("bessel_i(real): negative argument requires integer order");
    }
    return bessel_i_scaled(nu, cplx(x, 0.0)).real();
}

cplx bessel_i(double nu, cplx z) {
    const cplx s = bessel_i_scaled(nu, z);
    return s * std::exp(std::abs(z.real()));
}

double bessel_i(double nu, double x) {
    return bessel_i_scaled(nu, x) * std::exp(std::abs(x));
}

double log_bessel_i(double nu, double x) {
    check_bessel_args(nu, x);
    if (!(x > 0.0)) {
        throw DomainError("log_bessel_i: argument must be positive");
    }
    if (nu < 0.0 && std::floor(nu) == nu) {
        nu = -nu;
    }
    if (x >= 20.0) {
        cplx h;
        if (bessel_hankel_scaled(nu, cplx(x, 0.0), h) && h.real() > 0.0) {
            return std::log(h.real()) + x;
        }
    }
    const Scaled s = bessel_series(nu, cplx(x, 0.0));
    if (!(s.mant.real() > 0.0L)) {
        throw DomainError("log_bessel_i: I_nu(x) is not positive here");
    }
    return static_cast<double>(std::log(s.mant.real()) + s.expo);
}

double erf(double x) {
    return std::erf(x);
}

namespace {

void check_q_args(double nu, double a, double b, const SeriesControl& ctl) {
    ctl.validate();
    if (!(nu > -1.0) || !std::isfinite(nu)) {
        throw DomainError("q_sum: order must be finite and > -1");
    }
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("q_sum: arguments must be finite and >= 0");
    }
}

// Positive-term log-space accumulator.
struct LogSum {
    double log_max = -std::numeric_limits<double>::infinity();
    double acc = 0.0;  // sum relative to exp(log_max)

    void add(double log_t) {
        if (log_t <= log_max) {
            acc += std::exp(log_t - log_max);
        } else {
            acc = acc * std::exp(log_max - log_t) + 1.0;
            log_max = log_t;
        }
    }
    double log_value() const { return log_max + std::log(acc); }
};

// sum_l b^{2(nu+l)}/Gamma(nu+l+1), times e^{-b^2}.
double q_scaled_at_zero_a(double nu, double b, const SeriesControl& ctl) {
    const double b2 = b * b;
    const double lb2 = std::log(b2);
    LogSum s;
    double log_t = nu * lb2 - std::lgamma(nu + 1.0) - b2;
    for (long l = 0; l < ctl.max_terms; ++l) {
        s.add(log_t);
        const double ratio = b2 / (nu + l + 1.0);
        log_t += std::log(ratio);
        if (ratio < 1.0) {
            const double tail = log_t + std::log(1.0 / (1.0 - ratio));
            if (tail - s.log_value() < std::log(ctl.rel_tol)) {
                return std::exp(s.log_value());
            }
        }
    }
    throw TruncationError("q_sum: series at a = 0 did not converge", ctl.max_terms,
                          std::exp(log_t - s.log_value()));
}

}  // namespace

double q_sum_scaled(double nu, double a, double b, const SeriesControl& ctl) {
    check_q_args(nu, a, b, ctl);
    const double s2 = a * a + b * b;
    if (b == 0.0) {
        return nu == 0.0 ? std::exp(-a * a) : 0.0;
    }
    if (a == 0.0) {
        return q_scaled_at_zero_a(nu, b, ctl);
    }

    const double x = 2.0 * a * b;
    const double log_ratio = std::log(b / a);
    const double log_t0 = nu * log_ratio + log_bessel_i(nu, x) - s2;

    long budget = static_cast<long>(std::max(b * b - a * a, 0.0) + 12.0 * std::sqrt(s2) + 64.0);
    for (;;) {
        budget = std::min(budget, ctl.max_terms);
        // r_k = I_{nu+k+1}(x) / I_{nu+k}(x) by backward recurrence, started far
        // enough beyond both the budget and x for the start value to wash out.
        const long start = budget + static_cast<long>(2.0 * x) + 64;
        std::vector<double> log_r(static_cast<std::size_t>(budget));
        double r = 0.0;
        for (long k = start; k >= 0; --k) {
            r = 1.0 / (2.0 * (nu + k + 1.0) / x + r);
            if (k < budget) {
                log_r[static_cast<std::size_t>(k)] = std::log(r);
            }
        }
        LogSum s;
        double log_t = log_t0;
        double prev = std::numeric_limits<double>::infinity();
        double tail_rel = std::numeric_limits<double>::infinity();
        for (long l = 0; l < budget; ++l) {
            s.add(log_t);
            const double log_q = log_ratio + log_r[static_cast<std::size_t>(l)];
            const double next = log_t + log_q;
            if (next < log_t && log_t <= prev && log_q < 0.0) {
                const double tail = next - std::log1p(-std::exp(log_q));
                tail_rel = std::exp(tail - s.log_value());
                if (tail_rel < ctl.rel_tol) {
                    return std::exp(s.log_value());
                }
            }
            prev = log_t;
            log_t = next;
        }
        if (budget >= ctl.max_terms) {
            throw TruncationError("q_sum: tail bound above rel_tol within max_terms", budget, tail_rel);
        }
        budget *= 2;
    }
}

double q_sum(double nu, double a, double b, const SeriesControl& ctl) {
    const double scaled = q_sum_scaled(nu, a, b, ctl);
    if (scaled == 0.0) {
        return 0.0;
    }
    return std::exp(std::log(scaled) + a * a + b * b);
}

}  // namespace msf::specfun
