#include "msf/landau.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "msf/errors.hpp"
#include "msf/specfun.hpp"

namespace msf {

void FieldConfig::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("FieldConfig: gamma must be positive");
    }
    if (!(mu >= 0.0 && mu < 1.0)) {
        throw DomainError("FieldConfig: mu must lie in [0, 1)");
    }
}

int branch_of(int l) {
    return l < 0 ? 0 : 1;
}

QuantumNumbers resolve_qnums(int j, int l, int m, const FieldConfig& cfg) {
    cfg.validate();
    if (m < 0) {
        throw DomainError("resolve_qnums: m must be >= 0");
    }
    QuantumNumbers q;
    q.j = j;
    q.l = l;
    q.m = m;
    if (j == 0) {
        if (l >= 0) {
            throw DomainError("resolve_qnums: branch 0 needs l < 0, got l = " + std::to_string(l));
        }
        q.n1 = m;
        q.n2 = m - l - cfg.mu;
    } else if (j == 1) {
        if (l < 0) {
            throw DomainError("resolve_qnums: branch 1 needs l >= 0, got l = " + std::to_string(l));
        }
        q.n1 = m + l + cfg.mu;
        q.n2 = m;
    } else {
        throw DomainError("resolve_qnums: branch must be 0 or 1");
    }
    return q;
}

double state_norm(const FieldConfig& cfg) {
    return std::sqrt(cfg.gamma / (2.0 * std::numbers::pi));
}

namespace {

double radial(const QuantumNumbers& q, double rho) {
    return specfun::laguerre_fn_alpha(q.m, q.alpha(), rho);
}

cplx branch_phase(const QuantumNumbers& q) {
    if (q.j == 0) {
        return 1.0;
    }
    return q.l % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace

cplx stationary_state(const QuantumNumbers& q, double theta, double rho, const FieldConfig& cfg) {
    const cplx ang = std::polar(1.0, (q.l - cfg.l0) * theta);
    return state_norm(cfg) * ang * branch_phase(q) * radial(q, rho);
}

GridFunction sample_state(const QuantumNumbers& q, const GridPtr& grid, const FieldConfig& cfg) {
    GridFunction f;
    f.grid = grid;
    f.angular = q.l - cfg.l0;
    f.values.resize(grid->size());
    const cplx pre = state_norm(cfg) * branch_phase(q);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        f.values[i] = pre * radial(q, grid->nodes()[i]);
    }
    return f;
}

double energy_nonrel(const QuantumNumbers& q, const FieldConfig& cfg) {
    return (q.n1 + 0.5) * cfg.gamma;
}

cplx inner_product_perp(const GridFunction& f, const GridFunction& g, const FieldConfig& cfg) {
    if (!f.grid || !g.grid || !f.grid->same_as(*g.grid)) {
        throw UsageError("inner_product_perp: functions live on different grids");
    }
    if (f.values.size() != f.grid->size() || g.values.size() != g.grid->size()) {
        throw UsageError("inner_product_perp: profile size does not match the grid");
    }
    if (f.angular != g.angular) {
        return 0.0;
    }
    const auto& w = f.grid->weights();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] * std::conj(f.values[i]) * g.values[i];
    }
    return 2.0 * std::numbers::pi * acc / cfg.gamma;
}

std::vector<cplx> apply_radial_hamiltonian(const GridFunction& f, double nu, const FieldConfig& cfg) {
    const RadialGrid& g = *f.grid;
    // rho f'' + f' = D^2 f / (4 rho) with D = 2 rho d/drho.
    const std::vector<cplx> d2 = g.d_log(g.d_log(f.values));
    std::vector<cplx> out(f.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double rho = g.nodes()[i];
        out[i] = cfg.gamma * (-d2[i] / (4.0 * rho) +
                              (nu * nu / (4.0 * rho) + 0.5 * nu + 0.25 * rho) * f.values[i]);
    }
    return out;
}

double eigen_residual(const QuantumNumbers& q, const GridPtr& grid, const FieldConfig& cfg,
                      double rho_cut) {
    const GridFunction f = sample_state(q, grid, cfg);
    const std::vector<cplx> hf = apply_radial_hamiltonian(f, q.l + cfg.mu, cfg);
    const double e = energy_nonrel(q, cfg);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < hf.size(); ++i) {
        if (grid->nodes()[i] < rho_cut) {
            continue;
        }
        const double w = grid->weights()[i];
        num += w * std::norm(hf[i] - e * f.values[i]);
        den += w * std::norm(e * f.values[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace msf
