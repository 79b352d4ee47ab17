#include "msf/grid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "msf/errors.hpp"

namespace msf {

namespace {

// f_{n-1}, f_n, f_{n+1} of the normalized Laguerre functions at x, as
// mantissas sharing the factor exp(log_scale).
struct Triple {
    double prev, cur, next, log_scale;
};

Triple laguerre_triple(int n, double a, double x) {
    constexpr double kBig = 1e150;
    double log_scale = -0.5 * x + 0.5 * a * std::log(x) - 0.5 * std::lgamma(1.0 + a);
    double pm = 0.0;
    double p = 1.0;
    for (int k = 0; k <= n; ++k) {
        const double b = k == 0 ? 0.0 : std::sqrt(k * (k + a));
        const double nx = ((2.0 * k + 1.0 + a - x) * p - b * pm) / std::sqrt((k + 1.0) * (k + 1.0 + a));
        if (k == n) {
            return {pm, p, nx, log_scale};
        }
        pm = p;
        p = nx;
        if (std::abs(p) > kBig) {
            p /= kBig;
            pm /= kBig;
            log_scale += std::log(kBig);
        }
    }
    return {pm, p, 0.0, log_scale};
}

}  // namespace

Quadrature make_quadrature(double a, int n) {
    if (!(a > -1.0) || !std::isfinite(a)) {
        throw DomainError("make_quadrature: a must be > -1");
    }
    if (n < 2) {
        throw DomainError("make_quadrature: need at least 2 nodes");
    }
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 0; k < n; ++k) {
        diag(k) = 2.0 * k + 1.0 + a;
        if (k > 0) {
            sub(k - 1) = std::sqrt(k * (k + a));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("make_quadrature: eigenvalue solver failed");
    }

    Quadrature q;
    q.a = a;
    q.nodes.resize(n);
    q.weights.resize(n);
    q.flat_weights.resize(n);
    const double cn = std::sqrt(n * (n + a));
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        for (int it = 0; it < 6; ++it) {
            const Triple t = laguerre_triple(n, a, x);
            const double denom = n * t.cur - cn * t.prev;
            if (denom == 0.0) {
                break;
            }
            const double dx = x * t.cur / denom;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * x) {
                break;
            }
        }
        // Christoffel function: 1 / sum_k f_k(x)^2 over the weighted functions.
        double log_scale = -0.5 * x + 0.5 * a * std::log(x) - 0.5 * std::lgamma(1.0 + a);
        double pm = 0.0;
        double p = 1.0;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            acc += p * p;
            const double b = k == 0 ? 0.0 : std::sqrt(k * (k + a));
            const double nx = ((2.0 * k + 1.0 + a - x) * p - b * pm) / std::sqrt((k + 1.0) * (k + 1.0 + a));
            pm = p;
            p = nx;
            if (std::abs(p) > 1e100) {
                p *= 1e-100;
                pm *= 1e-100;
                acc *= 1e-200;
                log_scale += std::log(1e100);
            }
        }
        const double log_flat = -std::log(acc) - 2.0 * log_scale;
        q.nodes[i] = x;
        q.flat_weights[i] = std::exp(log_flat);
        q.weights[i] = std::exp(log_flat - x + a * std::log(x));
    }
    return q;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int deriv) {
    const int n = static_cast<int>(xs.size());
    if (deriv < 0 || deriv >= n) {
        throw UsageError("fd_weights: derivative order must be below the stencil size");
    }
    std::vector<std::vector<double>> c(n, std::vector<double>(deriv + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, deriv);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = c[i][deriv];
    }
    return out;
}

GridPtr RadialGrid::gauss(double a, int n_nodes) {
    const Quadrature q = make_quadrature(a, n_nodes);
    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    g->kind_ = Kind::Gauss;
    g->t0_ = a;
    g->rho_ = q.nodes;
    g->w_ = q.flat_weights;
    return g;
}

GridPtr RadialGrid::mapped(double t_min, double t_max, double h) {
    if (!(h > 0.0) || !(t_max > t_min)) {
        throw UsageError("RadialGrid::mapped: need h > 0 and t_max > t_min");
    }
    const auto n = static_cast<std::size_t>(std::ceil((t_max - t_min) / h)) + 1;
    if (n < 9) {
        throw UsageError("RadialGrid::mapped: fewer than 9 points");
    }
    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    g->kind_ = Kind::Mapped;
    g->h_ = h;
    g->t0_ = t_min;
    g->rho_.resize(n);
    g->w_.resize(n);
    g->sig_.resize(n);
    g->log_rho_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_min + h * static_cast<double>(i);
        g->rho_[i] = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        g->sig_[i] = 1.0 / (1.0 + std::exp(-t));
        g->log_rho_[i] = std::log(g->rho_[i]);
        g->w_[i] = h * g->sig_[i] * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
    }
    auto table = [](int width) {
        std::vector<std::vector<double>> rows;
        std::vector<double> xs(width);
        for (int k = 0; k < width; ++k) {
            xs[k] = k;
        }
        for (int pos = 0; pos < width; ++pos) {
            rows.push_back(fd_weights(pos, xs, 1));
        }
        return rows;
    };
    g->fd8_ = table(9);
    g->fd6_ = table(7);
    return g;
}

GridPtr RadialGrid::mapped_for(double alpha_min, double rho_max, double h) {
    if (!(alpha_min > -1.0)) {
        throw DomainError("RadialGrid::mapped_for: alpha_min must be > -1");
    }
    // rho^{1+alpha_min} drops below 1e-18 at the lower end.
    // Capped so that rho stays a normal double.
    const double t_min = std::max(-700.0, std::min(-40.0, std::log(1e-18) / (1.0 + alpha_min)));
    return mapped(t_min, std::max(rho_max, 10.0), h);
}

std::vector<cplx> RadialGrid::d_t(const std::vector<cplx>& f, int order, double c) const {
    if (kind_ != Kind::Mapped) {
        throw UsageError("RadialGrid: derivatives need a mapped grid");
    }
    if (f.size() != rho_.size()) {
        throw UsageError("RadialGrid: profile size does not match the grid");
    }
    const auto& tab = order == 8 ? fd8_ : fd6_;
    const long width = static_cast<long>(tab.size());
    const long n = static_cast<long>(f.size());
    std::vector<cplx> out(f.size());
    for (long i = 0; i < n; ++i) {
        const long start = std::clamp(i - width / 2, 0L, n - width);
        const auto& w = tab[static_cast<std::size_t>(i - start)];
        cplx acc = 0.0;
        if (c == 0.0) {
            for (long k = 0; k < width; ++k) {
                acc += w[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(start + k)];
            }
        } else {
            // Differentiate rho^{-c} f and multiply back by rho_i^c.
            const double li = log_rho_[static_cast<std::size_t>(i)];
            for (long k = 0; k < width; ++k) {
                const auto idx = static_cast<std::size_t>(start + k);
                acc += w[static_cast<std::size_t>(k)] * f[idx] * std::exp(c * (li - log_rho_[idx]));
            }
        }
        out[static_cast<std::size_t>(i)] = acc / h_;
    }
    return out;
}

std::vector<cplx> RadialGrid::d_rho(const std::vector<cplx>& f) const {
    std::vector<cplx> d = d_t(f, 8);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] /= sig_[i];
    }
    return d;
}

std::vector<cplx> RadialGrid::d_log(const std::vector<cplx>& f, double c) const {
    std::vector<cplx> d = d_t(f, 8, c);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] *= 2.0 * rho_[i] / sig_[i];
    }
    return d;
}

std::pair<double, double> RadialGrid::resolution_gap(const std::vector<cplx>& f, double rho_cut, double c) const {
    const std::vector<cplx> d8 = d_t(f, 8, c);
    const std::vector<cplx> d6 = d_t(f, 6, c);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (rho_[i] < rho_cut) {
            continue;
        }
        gap = std::max(gap, std::abs(d8[i] - d6[i]));
        scale = std::max(scale, std::abs(d8[i]));
    }
    return {gap, scale};
}

double RadialGrid::resolution_error(const std::vector<cplx>& f, double rho_cut, double c) const {
    const auto [gap, scale] = resolution_gap(f, rho_cut, c);
    return scale > 0.0 ? gap / scale : 0.0;
}

bool RadialGrid::same_as(const RadialGrid& o) const {
    return this == &o || (kind_ == o.kind_ && h_ == o.h_ && t0_ == o.t0_ && rho_ == o.rho_);
}

}  // namespace msf
