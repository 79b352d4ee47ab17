#include "msf/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "msf/completeness.hpp"
#include "msf/cs.hpp"
#include "msf/dirac.hpp"
#include "msf/errors.hpp"

namespace msf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Suite = void (*)(const RunConfig&, VerificationReport&);

double tol_of(const RunConfig& c, double pinned) { return c.tol.value_or(pinned); }

std::vector<double> mu_sweep(const RunConfig& c, std::vector<double> fallback) {
    return c.mu ? std::vector<double>{*c.mu} : fallback;
}

std::vector<int> vartheta_sweep(const RunConfig& c) {
    return c.vartheta ? std::vector<int>{*c.vartheta} : std::vector<int>{1, -1};
}

void record(VerificationReport& r, std::string name, std::string params, double err, double tol) {
    r.records.push_back({std::move(name), std::move(params), err, tol, err <= tol});
}

// A check that throws is a failed check, not a crashed run.
template <class F>
void guarded(VerificationReport& r, const std::string& name, const std::string& params, double tol, F&& f) {
    try {
        record(r, name, params, f(), tol);
    } catch (const std::exception& e) {
        record(r, name, params, kInf, tol);
        r.notes.push_back(fmt::format("{} [{}]: {}", name, params, e.what()));
    }
}

// Ratio of successive errors; below 1 iff strictly decreasing.
double worst_ratio(const std::vector<double>& errs) {
    double worst = 0.0;
    for (std::size_t k = 1; k < errs.size(); ++k) {
        worst = std::max(worst, errs[k] / errs[k - 1]);
    }
    return worst;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (double x : xs) {
        s += fmt::format("{}{:.3e}", s.empty() ? "" : " ", x);
    }
    return s;
}

DiracConfig dirac_config(const RunConfig& c, double mu, int vartheta) {
    DiracConfig dc;
    dc.cfg = c.field(mu);
    dc.mass = c.mass;
    dc.vartheta = vartheta;
    return dc;
}

void suite_orthonormality(const RunConfig& c, VerificationReport& r) {
    for (double mu : mu_sweep(c, {0.0, 0.25, 0.5, 0.9})) {
        guarded(r, "gram", fmt::format("mu={:g};m<=10;|l|<=10", mu), tol_of(c, 1e-10), [&] {
            const FieldConfig cfg = c.field(mu);
            const double alpha_min = std::min(mu, 1.0 - mu);
            const GridPtr grid = RadialGrid::mapped_for(alpha_min, 4.0 * 24.0 + 60.0);
            std::vector<double> worst(21, 0.0);
            parallel_for(21, [&](std::size_t i) {
                const int l = static_cast<int>(i) - 10;
                std::vector<GridFunction> fs;
                for (int m = 0; m <= 10; ++m) {
                    fs.push_back(sample_state(resolve_qnums(branch_of(l), l, m, cfg), grid, cfg));
                }
                for (std::size_t a = 0; a < fs.size(); ++a) {
                    for (std::size_t b = 0; b < fs.size(); ++b) {
                        const double want = a == b ? 1.0 : 0.0;
                        worst[i] = std::max(worst[i], std::abs(inner_product_perp(fs[a], fs[b], cfg) - want));
                    }
                }
            });
            return *std::max_element(worst.begin(), worst.end());
        });
    }
}

void suite_cs_normalization(const RunConfig& c, VerificationReport& r) {
    for (double mu : mu_sweep(c, {0.0, 0.25, 0.5, 0.75})) {
        guarded(r, "n0+n1=exp(u+v)", fmt::format("mu={:g};u,v=0:9:1", mu), tol_of(c, 1e-10), [&] {
            double worst = 0.0;
            for (int u = 0; u <= 9; ++u) {
                for (int v = 0; v <= 9; ++v) {
                    const double sum = cs_normalization(0, u, v, mu, c.series) + cs_normalization(1, u, v, mu, c.series);
                    const double want = std::exp(static_cast<double>(u + v));
                    worst = std::max(worst, std::abs(sum - want) / want);
                }
            }
            return worst;
        });
    }
    double worst_rel = 0.0;
    guarded(r, "mm-limit", "mu=0;samples=20;|z|<=1.5;seed=20240611", tol_of(c, 1e-10), [&] {
        const FieldConfig cfg = c.field(0.0);
        if (cfg.l0 != 0) {
            throw DomainError("the zero-flux limit needs l0 = 0");
        }
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double theta = 2.0 * kPi * unit(rng);
            const double rho = 0.05 + 5.95 * unit(rng);
            const cplx z1 = std::polar(1.5 * unit(rng), 2.0 * kPi * unit(rng));
            const cplx z2 = std::polar(1.5 * unit(rng), 2.0 * kPi * unit(rng));
            const CSLabel label{z1, z2};
            const cplx a = mm_superpose(label, theta, rho, cfg, c.series);
            const cplx b = mm_double_series(label, theta, rho, cfg, c.series);
            // Compared on the unit-norm state; far out in the tail both sums cancel
            // down from e^{(u+v)/2}.
            const double u = std::norm(z1);
            const double v = std::norm(z2);
            const double n = std::sqrt(cs_normalization(0, u, v, 0.0, c.series) + cs_normalization(1, u, v, 0.0, c.series));
            worst = std::max(worst, std::abs(a - b) / n);
            worst_rel = std::max(worst_rel, std::abs(a - b) / std::abs(b));
        }
        return worst;
    });
    r.notes.push_back(fmt::format("mm-limit: worst relative pointwise gap {:.3e}", worst_rel));
}

void suite_weights(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.5);
    if (mu == 0.5) {
        for (int j : {0, 1}) {
            guarded(r, "series-vs-erf", fmt::format("mu=0.5;j={};u,v=0:9:0.5", j), tol_of(c, 1e-12), [&] {
                double worst = 0.0;
                for (int a = 0; a <= 18; ++a) {
                    for (int b = 0; b <= 18; ++b) {
                        const double u = 0.5 * a;
                        const double v = 0.5 * b;
                        worst = std::max(worst, std::abs(weight_fn({j, mu}, u, v, c.series) - weight_half_closed(j, u, v)));
                    }
                }
                return worst;
            });
        }
    } else {
        r.notes.push_back("series-vs-erf skipped: the erf closed form holds at mu = 1/2 only");
    }
    guarded(r, "zero-flux", "mu=0;u,v=0:9:0.5", tol_of(c, 1e-10), [&] {
        double worst = 0.0;
        for (int a = 0; a <= 18; ++a) {
            for (int b = 0; b <= 18; ++b) {
                const double u = 0.5 * a;
                const double v = 0.5 * b;
                const double w = weight_fn({0, 0.0}, u, v, c.series) + weight_fn({1, 0.0}, u, v, c.series);
                worst = std::max(worst, std::abs(w - 1.0 / (kPi * kPi)));
                worst = std::max(worst, std::abs(mm_weight_sum(u, v) - 1.0 / (kPi * kPi)));
            }
        }
        return worst * kPi * kPi;
    });
}

void suite_moments(const RunConfig& c, VerificationReport& r) {
    for (int k = 1; k <= 50; ++k) {
        const double n = -0.9 + 12.9 * k / 50.0;
        guarded(r, "moment", fmt::format("n={:.4f}", n), tol_of(c, 1e-10), [&] {
            const MomentResult m = moment_check(n);
            return m.abs_err / m.gamma_value;
        });
    }
}

void suite_g_matrix(const RunConfig& c, VerificationReport& r) {
    for (double mu : mu_sweep(c, {0.25, 0.5, 0.75})) {
        guarded(r, "diagonal", fmt::format("mu={:g};m<=6;|l|<=4;nodes={}", mu, c.nodes), tol_of(c, 1e-9), [&] {
            std::vector<double> worst(9, 0.0);
            parallel_for(9, [&](std::size_t i) {
                const int l = static_cast<int>(i) - 4;
                const int j = branch_of(l);
                for (int m = 0; m <= 6; ++m) {
                    const double g = g_matrix(m, m, l, l, mu, j, c.nodes, c.series);
                    const double want = g_closed(m, l, mu, j);
                    worst[i] = std::max(worst[i], std::abs(g - want) / want);
                }
            });
            return *std::max_element(worst.begin(), worst.end());
        });
        guarded(r, "off-diagonal", fmt::format("mu={:g};m,n<=6;|l|,|k|<=4", mu), tol_of(c, 0.0), [&] {
            double worst = 0.0;
            for (int l = -4; l <= 4; ++l) {
                for (int k = -4; k <= 4; ++k) {
                    if (branch_of(l) != branch_of(k)) {
                        continue;
                    }
                    for (int m = 0; m <= 6; ++m) {
                        for (int n = 0; n <= 6; ++n) {
                            if (m != n || l != k) {
                                worst = std::max(worst, std::abs(g_matrix(m, n, l, k, mu, branch_of(l), c.nodes, c.series)));
                            }
                        }
                    }
                }
            }
            return worst;
        });
    }
}

void suite_unity(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.5);
    for (int j : {0, 1}) {
        guarded(r, "reconstruction", fmt::format("mu={:g};j={};m<=4;|l|<=4;nodes={}", mu, j, c.nodes),
                tol_of(c, 1e-6), [&] {
                    std::vector<std::pair<int, int>> basis;
                    for (int l = -4; l <= 4; ++l) {
                        for (int m = 0; m <= 4; ++m) {
                            if (branch_of(l) == j) {
                                basis.emplace_back(l, m);
                            }
                        }
                    }
                    const auto u = unity_reconstruction(basis, mu, j, c.nodes, c.series);
                    double worst = 0.0;
                    for (std::size_t a = 0; a < u.size(); ++a) {
                        for (std::size_t b = 0; b < u.size(); ++b) {
                            worst = std::max(worst, std::abs(u[a][b] - (a == b ? 1.0 : 0.0)));
                        }
                    }
                    return worst;
                });
    }
}

void suite_propagator(const RunConfig& c, VerificationReport& r) {
    for (double mu : mu_sweep(c, {0.0, 0.3, 0.7})) {
        const FieldConfig cfg = c.field(mu);
        guarded(r, "closed-vs-series", fmt::format("mu={:g};tau=0.05..1;|l|<=2", mu), tol_of(c, 1e-8), [&] {
            double worst = 0.0;
            for (double tau : {0.05, 0.1, 0.2, 0.5, 1.0}) {
                for (int l = -2; l <= 2; ++l) {
                    for (auto [rho, rho_p] : {std::pair{0.5, 1.0}, std::pair{1.0, 1.0}, std::pair{2.0, 1.5},
                                              std::pair{3.0, 2.5}}) {
                        KernelParams p;
                        p.j = branch_of(l);
                        p.l = l;
                        p.cfg = cfg;
                        p.delta_t = cplx(0.0, -tau);
                        const cplx a = propagator_closed(p, 0.3, rho, rho_p);
                        const cplx b = propagator_series(p, 0.3, rho, rho_p, c.series);
                        worst = std::max(worst, std::abs(a - b) / std::abs(b));
                    }
                }
            }
            return worst;
        });
        for (int l : {-1, 0, 2}) {
            std::vector<double> errs;
            const std::string params = fmt::format("mu={:g};l={};rho=1.5;tau=0.2,0.1,0.05,0.02", mu, l);
            guarded(r, "smearing-monotone", params, tol_of(c, 1.0), [&] {
                for (double tau : {0.2, 0.1, 0.05, 0.02}) {
                    errs.push_back(propagator_smearing_error(branch_of(l), l, cfg, tau, 1.5, 1.5, 0.4));
                }
                return worst_ratio(errs);
            });
            r.notes.push_back(fmt::format("smearing errors [{}]: {}", params, join(errs)));
        }
    }
}

void suite_dirac(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.4);
    for (int vt : vartheta_sweep(c)) {
        const DiracConfig dc = dirac_config(c, mu, vt);
        const std::string params = fmt::format("mu={:g};vartheta={};M={:g};|l|<=2;m<=1", mu, vt, c.mass);
        std::vector<DiracState> states;
        double worst_res = 0.0;
        double worst_sp2 = 0.0;
        guarded(r, "residual", params, tol_of(c, 1e-5), [&] {
            const GridPtr grid = dirac_grid(dc, 12);
            for (int l = -2; l <= 2; ++l) {
                for (int m = 0; m <= 1; ++m) {
                    for (int ch : {1, -1}) {
                        RelQuantumNumbers q;
                        try {
                            q = resolve_rel_qnums(rel_branch_of(l, vt), l, m, ch, dc);
                        } catch (const DomainError&) {
                            continue;  // irregular state absent at mu = 0
                        }
                        states.push_back(dirac_spinor(q, dc, ch, grid));
                        worst_res = std::max(worst_res, dirac_residual(states.back(), dc));
                        const SigmaPSquaredCheck sp = sigma_p_squared_check(q, dc, grid);
                        worst_sp2 = std::max(worst_sp2, std::abs(sp.rayleigh - sp.expected) / std::max(sp.expected, 1.0));
                    }
                }
            }
            return worst_res;
        });
        record(r, "sigma-p-squared", params, states.empty() ? kInf : worst_sp2, tol_of(c, 1e-6));
        guarded(r, "d-orthonormality", params, tol_of(c, 1e-8), [&] {
            if (states.empty()) {
                throw DomainError("no states were built");
            }
            double worst = 0.0;
            for (std::size_t a = 0; a < states.size(); ++a) {
                for (std::size_t b = 0; b < states.size(); ++b) {
                    const double want = a == b ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(inner_product_d(states[a].psi, states[b].psi, dc.cfg) - want));
                }
            }
            return worst;
        });
    }
}

void suite_rel_cs(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.5);
    const CSLabel a{cplx(0.6, 0.3), cplx(-0.4, 0.5)};
    const CSLabel b{cplx(0.5, -0.2), cplx(-0.3, 0.6)};
    struct Case {
        int vartheta, charge, j;
    };
    std::vector<Case> cases;
    for (int vt : vartheta_sweep(c)) {
        cases.push_back({vt, 1, vt == 1 ? 0 : 1});
        cases.push_back({vt, -1, vt == 1 ? 1 : 0});
    }
    for (const Case& k : cases) {
        const DiracConfig dc = dirac_config(c, mu, k.vartheta);
        const std::string params =
            fmt::format("mu={:g};vartheta={};charge={};j={};M={:g}", mu, k.vartheta, k.charge, k.j, c.mass);
        const GridPtr grid = dirac_grid(dc, 30);
        std::optional<RelCS> ca;
        std::optional<RelCS> cb;
        guarded(r, "unit-norm", params, tol_of(c, 1e-7), [&] {
            ca = rel_cs(k.j, a, dc, k.charge, grid, c.series);
            cb = rel_cs(k.j, b, dc, k.charge, grid, c.series);
            return std::max(std::abs(rel_cs_overlap_quadrature(*ca, *ca, dc.cfg) - 1.0),
                            std::abs(rel_cs_overlap_quadrature(*cb, *cb, dc.cfg) - 1.0));
        });
        guarded(r, "overlap-closed-vs-quadrature", params, tol_of(c, 1e-7), [&] {
            if (!ca || !cb) {
                throw DomainError("coherent states were not built");
            }
            const cplx closed = rel_cs_overlap_closed(k.j, k.charge, a, b, dc, c.series);
            return std::abs(rel_cs_overlap_quadrature(*ca, *cb, dc.cfg) - closed);
        });
        guarded(r, "operator-form", params, tol_of(c, 1e-7), [&] {
            const OperatorFormCheck f = rel_cs_operator_form(k.j, k.charge, a, b, dc, grid, c.series);
            r.notes.push_back(fmt::format("operator-form [{}]: 2M(+-Pi0+M) form differs by factor {:.4f}", params,
                                          std::abs(f.literal / f.spectral)));
            return std::abs(f.quadrature - f.spectral) / std::abs(f.spectral);
        });
    }
}

void suite_embed_3p1(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.3);
    for (int vt : vartheta_sweep(c)) {
        const DiracConfig dc = dirac_config(c, mu, vt);
        const std::string params = fmt::format("mu={:g};vartheta={};M={:g};s=+-1;p3=0,0.7,-1.3", mu, vt, c.mass);
        double worst_energy = kInf;
        guarded(r, "spin-eigen-residual", params, tol_of(c, 1e-5), [&] {
            const GridPtr grid = dirac_grid(dc, 12);
            double worst = 0.0;
            worst_energy = 0.0;
            for (int ch : {1, -1}) {
                const RelQuantumNumbers q = resolve_rel_qnums(rel_branch_of(1, vt), 1, 1, ch, dc);
                for (int s : {1, -1}) {
                    for (double p3 : {0.0, 0.7, -1.3}) {
                        const Embedded3p1 e = embed_3p1(q, ch, s, p3, dc, grid);
                        worst = std::max(worst, spin_residual_3p1(e, dc));
                        worst_energy = std::max(worst_energy, energy_residual_3p1(e, dc));
                    }
                }
            }
            return worst;
        });
        record(r, "energy-residual", params, worst_energy, tol_of(c, 1e-5));
    }
    std::vector<double> ratios;
    guarded(r, "small-component-1/M", fmt::format("mu={:g};M=10,100,1000", mu), tol_of(c, 0.05), [&] {
        DiracConfig dc = dirac_config(c, mu, 1);
        const GridPtr grid = dirac_grid(dc, 12);
        for (double m : {10.0, 100.0, 1000.0}) {
            dc.mass = m;
            const Embedded3p1 e = embed_3p1(resolve_rel_qnums(1, 1, 0, 1, dc), 1, 1, 0.0, dc, grid);
            ratios.push_back(small_component_ratio(e, dc.cfg));
        }
        // Log-log slope between successive masses; O(1/M) means -1.
        double worst = 0.0;
        for (std::size_t k = 1; k < ratios.size(); ++k) {
            worst = std::max(worst, std::abs(std::log10(ratios[k] / ratios[k - 1]) + 1.0));
        }
        return worst;
    });
    r.notes.push_back(fmt::format("small-component ratios at M=10,100,1000: {}", join(ratios)));
}

void suite_kernel_rel(const RunConfig& c, VerificationReport& r) {
    const double mu = c.mu.value_or(0.3);
    for (int vt : vartheta_sweep(c)) {
        const DiracConfig dc = dirac_config(c, mu, vt);
        guarded(r, "projector", fmt::format("mu={:g};vartheta={};sigma=+-1;l=-1,0,2", mu, vt), tol_of(c, 0.0), [&] {
            double worst = 0.0;
            for (int sg : {1, -1}) {
                const std::size_t slot = sg == 1 ? 0 : 3;
                for (int l : {-1, 0, 2}) {
                    for (cplx s : {cplx(0.3, -0.2), cplx(0.0, -0.5), cplx(1.1, -0.05)}) {
                        const Matrix2 m = green_kernel_rel(sg, l, dc, s, 0.4, 0.1, 1.0, 1.5);
                        if (m[slot] == 0.0) {
                            return kInf;
                        }
                        for (std::size_t k = 0; k < 4; ++k) {
                            if (k != slot) {
                                worst = std::max(worst, std::abs(m[k]) / std::abs(m[slot]));
                            }
                        }
                    }
                }
            }
            return worst;
        });
        for (int sg : {1, -1}) {
            for (int l : {0, 2}) {
                std::vector<double> errs;
                const std::string params =
                    fmt::format("mu={:g};vartheta={};sigma={};l={};rho=2;tau=1e-2..1e-3", mu, vt, sg, l);
                guarded(r, "smearing-monotone", params, tol_of(c, 1.0), [&] {
                    for (double tau : {1e-2, 5e-3, 2e-3, 1e-3}) {
                        errs.push_back(kernel_rel_smearing_error(sg, l, dc, tau, 2.0, 2.0, 0.5));
                    }
                    return worst_ratio(errs);
                });
                r.notes.push_back(fmt::format("smearing errors [{}]: {}", params, join(errs)));
            }
        }
    }
}

const std::vector<std::pair<std::string, Suite>>& suites() {
    static const std::vector<std::pair<std::string, Suite>> s = {
        {"orthonormality", suite_orthonormality},
        {"cs-normalization", suite_cs_normalization},
        {"weights", suite_weights},
        {"moments", suite_moments},
        {"g-matrix", suite_g_matrix},
        {"unity", suite_unity},
        {"propagator", suite_propagator},
        {"dirac", suite_dirac},
        {"rel-cs", suite_rel_cs},
        {"embed-3p1", suite_embed_3p1},
        {"kernel-rel", suite_kernel_rel},
    };
    return s;
}

std::string fmt_csv(double x) { return std::isfinite(x) ? fmt::format("{:.12g}", x) : fmt::format("{}", x); }

std::string fmt_json(double x) { return std::isfinite(x) ? fmt::format("{:.17g}", x) : "null"; }

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    out += fmt::format("\\u{:04x}", static_cast<int>(ch));
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return out + "\"";
}

double parse_number(const std::string& s) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
        throw UsageError("not a finite number: '" + s + "'");
    }
    return x;
}

std::vector<double> axis_of(const TabulateSpec& spec, const std::string& name, const char* fallback = nullptr) {
    for (const auto& [k, v] : spec.axes) {
        if (k == name) {
            return parse_axis(v);
        }
    }
    if (fallback) {
        return parse_axis(fallback);
    }
    throw UsageError("tabulate " + spec.target + ": missing axis --" + name);
}

// Evaluates f on the product of two axes, row by grid index.
Table product_table(std::vector<std::string> columns, const std::vector<double>& xa, const std::vector<double>& xb,
                    const std::function<std::vector<double>(double, double)>& f) {
    Table t{std::move(columns), {}};
    t.rows.resize(xa.size() * xb.size());
    parallel_for(t.rows.size(), [&](std::size_t i) {
        const double a = xa[i / xb.size()];
        const double b = xb[i % xb.size()];
        std::vector<double> row{a, b};
        for (double v : f(a, b)) {
            row.push_back(v);
        }
        t.rows[i] = std::move(row);
    });
    return t;
}

}  // namespace

void RunConfig::validate() const {
    if (mu && !(*mu >= 0.0 && *mu < 1.0)) {
        throw UsageError("mu must lie in [0, 1)");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw UsageError("gamma must be positive");
    }
    if (vartheta && *vartheta != 1 && *vartheta != -1) {
        throw UsageError("vartheta must be +1 or -1");
    }
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw UsageError("mass must be >= 0");
    }
    if (tol && !(*tol >= 0.0)) {
        throw UsageError("tol must be >= 0");
    }
    if (nodes < 2 || nodes > 400) {
        throw UsageError("nodes must lie in [2, 400]");
    }
    if (format != "csv" && format != "json") {
        throw UsageError("format must be csv or json");
    }
    try {
        series.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

FieldConfig RunConfig::field(double mu_value) const {
    FieldConfig f;
    f.gamma = gamma;
    f.l0 = l0;
    f.mu = mu_value;
    return f;
}

bool VerificationReport::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const CheckRecord& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : suites()) {
            n.push_back(s.first);
        }
        n.push_back("all");
        return n;
    }();
    return names;
}

VerificationReport verify_suite(const RunConfig& config, const std::string& suite) {
    config.validate();
    const auto it = std::find_if(suites().begin(), suites().end(), [&](const auto& s) { return s.first == suite; });
    if (suite != "all" && it == suites().end()) {
        throw UsageError("unknown suite '" + suite + "'");
    }
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    r.suite = suite;
    r.environment = {
        {"mu", config.mu ? fmt_json(*config.mu) : "sweep"},
        {"l0", fmt::format("{}", config.l0)},
        {"gamma", fmt_json(config.gamma)},
        {"vartheta", config.vartheta ? fmt::format("{}", *config.vartheta) : "sweep"},
        {"mass", fmt_json(config.mass)},
        {"tol", config.tol ? fmt_json(*config.tol) : "pinned"},
        {"nodes", fmt::format("{}", config.nodes)},
        {"series_rel_tol", fmt_json(config.series.rel_tol)},
        {"series_max_terms", fmt::format("{}", config.series.max_terms)},
    };
    for (const auto& [name, fn] : suites()) {
        if (suite == "all" || suite == name) {
            VerificationReport part;
            fn(config, part);
            for (CheckRecord& c : part.records) {
                c.name = suite == "all" ? name + "/" + c.name : c.name;
                r.records.push_back(std::move(c));
            }
            r.notes.insert(r.notes.end(), part.notes.begin(), part.notes.end());
        }
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<double> parse_axis(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t next = spec.find(':', pos);
        parts.push_back(spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    if (parts.size() == 1) {
        return {parse_number(parts[0])};
    }
    if (parts.size() != 3) {
        throw UsageError("axis '" + spec + "' is not start:stop:step");
    }
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) {
        throw UsageError("axis '" + spec + "' needs step > 0 and stop >= start");
    }
    const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
    if (count > 1e7) {
        throw UsageError("axis '" + spec + "' has too many points");
    }
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = start + step * static_cast<double>(i);
    }
    return xs;
}

const std::vector<std::string>& tabulate_targets() {
    static const std::vector<std::string> t = {"state", "cs-density", "weight", "kernel", "spectrum"};
    return t;
}

Table tabulate(const RunConfig& config, const TabulateSpec& spec) {
    config.validate();
    const double mu = config.mu.value_or(0.5);
    const FieldConfig cfg = config.field(mu);
    if (spec.target == "weight") {
        return product_table({"u", "v", "W0", "W1"}, axis_of(spec, "u"), axis_of(spec, "v"), [&](double u, double v) {
            return std::vector<double>{weight_fn({0, mu}, u, v, config.series), weight_fn({1, mu}, u, v, config.series)};
        });
    }
    if (spec.target == "state") {
        const QuantumNumbers q = resolve_qnums(branch_of(spec.l), spec.l, spec.m, cfg);
        return product_table({"theta", "rho", "re", "im"}, axis_of(spec, "theta", "0"), axis_of(spec, "rho"),
                             [&](double theta, double rho) {
                                 const cplx v = stationary_state(q, theta, rho, cfg);
                                 return std::vector<double>{v.real(), v.imag()};
                             });
    }
    if (spec.target == "cs-density") {
        const CSLabel label{spec.z1, spec.z2};
        return product_table({"theta", "rho", "re", "im", "density"}, axis_of(spec, "theta", "0"),
                             axis_of(spec, "rho"), [&](double theta, double rho) {
                                 const cplx v = cs_state(spec.j, label, theta, rho, cfg, config.series);
                                 return std::vector<double>{v.real(), v.imag(), std::norm(v)};
                             });
    }
    if (spec.target == "kernel") {
        KernelParams p;
        p.j = branch_of(spec.l);
        p.l = spec.l;
        p.cfg = cfg;
        p.delta_t = cplx(0.0, -spec.tau);
        return product_table({"rho", "rhop", "re", "im"}, axis_of(spec, "rho"), axis_of(spec, "rhop"),
                             [&](double rho, double rho_p) {
                                 const cplx v = propagator_closed(p, spec.dtheta, rho, rho_p);
                                 return std::vector<double>{v.real(), v.imag()};
                             });
    }
    if (spec.target == "spectrum") {
        if (spec.lmax < 0 || spec.mmax < 0) {
            throw UsageError("tabulate spectrum: lmax and mmax must be >= 0");
        }
        Table t{{"l", "m", "j", "n1", "energy", "energy_mu0"}, {}};
        const FieldConfig cfg0 = config.field(0.0);
        for (int l = -spec.lmax; l <= spec.lmax; ++l) {
            for (int m = 0; m <= spec.mmax; ++m) {
                const QuantumNumbers q = resolve_qnums(branch_of(l), l, m, cfg);
                const QuantumNumbers q0 = resolve_qnums(branch_of(l), l, m, cfg0);
                t.rows.push_back({static_cast<double>(l), static_cast<double>(m), static_cast<double>(q.j), q.n1,
                                  energy_nonrel(q, cfg), energy_nonrel(q0, cfg0)});
            }
        }
        return t;
    }
    throw UsageError("unknown tabulate target '" + spec.target + "'");
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        os << (k ? "," : "") << csv_field(t.columns[k]);
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            os << (k ? "," : "") << fmt_csv(row[k]);
        }
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& t, const std::vector<std::pair<std::string, std::string>>& meta) {
    os << "{\"meta\":{";
    for (std::size_t k = 0; k < meta.size(); ++k) {
        os << (k ? "," : "") << json_string(meta[k].first) << ':' << json_string(meta[k].second);
    }
    os << "},\"records\":[";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        os << (i ? ",\n" : "\n") << '{';
        for (std::size_t k = 0; k < t.rows[i].size(); ++k) {
            os << (k ? "," : "") << json_string(t.columns[k]) << ':' << fmt_json(t.rows[i][k]);
        }
        os << '}';
    }
    os << "\n]}\n";
}

void write_report_csv(std::ostream& os, const VerificationReport& r, bool timing) {
    os << "suite,name,params,achieved_error,tolerance,status\n";
    for (const CheckRecord& c : r.records) {
        os << csv_field(r.suite) << ',' << csv_field(c.name) << ',' << csv_field(c.params) << ','
           << fmt_csv(c.achieved_error) << ',' << fmt_csv(c.tolerance) << ',' << (c.pass ? "pass" : "fail") << '\n';
    }
    if (timing) {
        os << csv_field(r.suite) << ",wall_time,,"
           << fmt_csv(r.wall_time) << ",,info\n";
    }
}

void write_report_json(std::ostream& os, const VerificationReport& r, bool timing) {
    os << "{\"meta\":{\"suite\":" << json_string(r.suite) << ",\"status\":" << json_string(r.all_pass() ? "pass" : "fail")
       << ",\"environment\":{";
    for (std::size_t k = 0; k < r.environment.size(); ++k) {
        os << (k ? "," : "") << json_string(r.environment[k].first) << ':' << json_string(r.environment[k].second);
    }
    os << "},\"notes\":[";
    for (std::size_t k = 0; k < r.notes.size(); ++k) {
        os << (k ? "," : "") << json_string(r.notes[k]);
    }
    os << ']';
    if (timing) {
        os << ",\"wall_time\":" << fmt_json(r.wall_time);
    }
    os << "},\"records\":[";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const CheckRecord& c = r.records[i];
        os << (i ? ",\n" : "\n") << "{\"name\":" << json_string(c.name) << ",\"params\":" << json_string(c.params)
           << ",\"achieved_error\":" << fmt_json(c.achieved_error) << ",\"tolerance\":" << fmt_json(c.tolerance)
           << ",\"status\":" << json_string(c.pass ? "pass" : "fail") << '}';
    }
    os << "\n]}\n";
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(run, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace msf
