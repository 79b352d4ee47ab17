#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "msf/errors.hpp"
#include "msf/verify.hpp"

namespace {

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw msf::UsageError("cannot open output file " + path);
    }
    write(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent states in the magnetic-solenoid field: verification and tabulation"};
    app.set_config("--config", "", "flat key=value file; command-line options win")->envname("MSF_CONFIG");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    msf::RunConfig cfg;
    std::string suite = "all";
    std::string out;
    double mu = 0.0;
    int vartheta = 1;
    double tol = 0.0;

    auto* mu_opt = app.add_option("--mu", mu, "flux mantissa in [0, 1); default: each suite's sweep");
    app.add_option("--l0", cfg.l0, "integer part of the flux");
    app.add_option("--gamma", cfg.gamma, "field strength eB");
    auto* vt_opt = app.add_option("--vartheta", vartheta, "self-adjoint extension +1 or -1; default: both");
    app.add_option("--mass", cfg.mass, "Dirac mass");
    auto* tol_opt = app.add_option("--tol", tol, "override every check tolerance");
    app.add_option("--nodes", cfg.nodes, "Gauss-Laguerre nodes per axis");
    app.add_option("--rel-tol", cfg.series.rel_tol, "series truncation tolerance");
    app.add_option("--max-terms", cfg.series.max_terms, "series term budget");
    app.add_option("--out", out, "output path; stdout if absent");
    app.add_option("--format", cfg.format, "csv or json");
    app.add_flag("--timing", cfg.timing, "report wall time");

    // Named options live on the top level so that a flat config file can
    // set any of them; subcommands fall through to them.
    auto* verify = app.add_subcommand("verify", "run identity suites")->fallthrough();
    app.add_option("--suite", suite, "suite name or all");

    msf::TabulateSpec spec;
    auto* tab = app.add_subcommand("tabulate", "write plot data")->fallthrough();
    tab->add_option("target", spec.target, "state, cs-density, weight, kernel or spectrum")->required();
    for (const char* axis : {"u", "v", "rho", "rhop", "theta"}) {
        app.add_option_function<std::string>(
            std::string("--") + axis, [&spec, axis](const std::string& v) { spec.axes.emplace_back(axis, v); },
            "axis start:stop:step");
    }
    app.add_option("--j", spec.j, "coherent-state branch");
    app.add_option("--l", spec.l, "angular number");
    app.add_option("--m", spec.m, "radial number");
    app.add_option("--lmax", spec.lmax, "spectrum: |l| range");
    app.add_option("--mmax", spec.mmax, "spectrum: m range");
    app.add_option("--tau", spec.tau, "kernel: Wick-rotated time");
    app.add_option("--dtheta", spec.dtheta, "kernel: angle difference");
    app.add_option("--z1", spec.z1, "coherent-state label, e.g. 0.5+0.2i");
    app.add_option("--z2", spec.z2, "coherent-state label");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (mu_opt->count() > 0) {
        cfg.mu = mu;
    }
    if (vt_opt->count() > 0) {
        cfg.vartheta = vartheta;
    }
    if (tol_opt->count() > 0) {
        cfg.tol = tol;
    }

    try {
        if (verify->parsed()) {
            const msf::VerificationReport r = msf::verify_suite(cfg, suite);
            emit(out, [&](std::ostream& os) {
                if (cfg.format == "json") {
                    msf::write_report_json(os, r, cfg.timing);
                } else {
                    msf::write_report_csv(os, r, cfg.timing);
                }
            });
            std::size_t failed = 0;
            for (const auto& c : r.records) {
                if (!c.pass) {
                    ++failed;
                    std::cerr << fmt::format("FAIL {} [{}]: {:.3e} > {:.3e}\n", c.name, c.params, c.achieved_error,
                                             c.tolerance);
                }
            }
            if (failed > 0) {
                for (const auto& n : r.notes) {
                    std::cerr << "note: " << n << '\n';
                }
            }
            std::cerr << fmt::format("suite {}: {} checks, {} failed", r.suite, r.records.size(), failed);
            if (cfg.timing) {
                std::cerr << fmt::format(", {:.2f} s", r.wall_time);
            }
            std::cerr << '\n';
            return failed == 0 ? 0 : 1;
        }
        const msf::Table t = msf::tabulate(cfg, spec);
        emit(out, [&](std::ostream& os) {
            if (cfg.format == "json") {
                std::vector<std::pair<std::string, std::string>> meta{
                    {"target", spec.target},
                    {"mu", fmt::format("{:.17g}", cfg.mu.value_or(0.5))},
                    {"l0", std::to_string(cfg.l0)},
                    {"gamma", fmt::format("{:.17g}", cfg.gamma)},
                };
                for (const auto& [k, v] : spec.axes) {
                    meta.emplace_back("axis_" + k, v);
                }
                msf::write_json(os, t, meta);
            } else {
                msf::write_csv(os, t);
            }
        });
        return 0;
    } catch (const msf::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const msf::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
