// One pass/fail line per acceptance criterion, at the pinned tolerances.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <iostream>
#include <map>
#include <string>

#include "msf/verify.hpp"

namespace {

struct Criterion {
    int id;
    const char* title;
    const char* suite;
    const char* record;  // empty: every record of the suite
};

const Criterion kCriteria[] = {
    {1, "orthonormality of the stationary states", "orthonormality", ""},
    {2, "CS normalization N0 + N1 = exp(u + v)", "cs-normalization", "n0+n1=exp(u+v)"},
    {3, "weight series vs erf form at mu = 1/2", "weights", "series-vs-erf"},
    {4, "zero-flux weight constant", "weights", "zero-flux"},
    {5, "moment problem", "moments", ""},
    {6, "G-matrix", "g-matrix", ""},
    {7, "resolution of unity", "unity", ""},
    {8, "propagator closed form vs mode sum, delta limit", "propagator", ""},
    {9, "zero-flux limit of the coherent states", "cs-normalization", "mm-limit"},
    {10, "Dirac sector", "dirac", ""},
    {11, "relativistic coherent states", "rel-cs", ""},
    {12, "(3+1) embedding", "embed-3p1", ""},
    {13, "relativistic kernel", "kernel-rel", ""},
};

double excess(const msf::CheckRecord& r) {
    if (r.tolerance > 0.0) {
        return r.achieved_error / r.tolerance;
    }
    return r.achieved_error > 0.0 ? INFINITY : 0.0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance gate"};
    int only = 0;
    bool verbose = false;
    app.add_option("--criterion", only, "run a single criterion (1-13)")->check(CLI::Range(1, 13));
    app.add_flag("--verbose", verbose, "print suite notes");
    CLI11_PARSE(app, argc, argv);

    std::map<std::string, msf::VerificationReport> cache;
    bool all_ok = true;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) {
            continue;
        }
        auto it = cache.find(c.suite);
        if (it == cache.end()) {
            it = cache.emplace(c.suite, msf::verify_suite(msf::RunConfig{}, c.suite)).first;
        }
        const msf::VerificationReport& rep = it->second;
        std::size_t n = 0;
        std::size_t failed = 0;
        const msf::CheckRecord* worst = nullptr;
        for (const auto& r : rep.records) {
            if (*c.record && r.name != c.record) {
                continue;
            }
            ++n;
            failed += r.pass ? 0 : 1;
            if (!worst || excess(r) > excess(*worst)) {
                worst = &r;
            }
        }
        const bool ok = n > 0 && failed == 0;
        all_ok = all_ok && ok;
        std::cout << fmt::format("criterion {:2d} {}  {}: {}/{} checks pass", c.id, ok ? "PASS" : "FAIL", c.title,
                                 n - failed, n);
        if (worst) {
            std::cout << fmt::format("; worst {} [{}] {:.3e} vs tol {:.1e}", worst->name, worst->params,
                                     worst->achieved_error, worst->tolerance);
        }
        std::cout << '\n';
        if (verbose) {
            for (const auto& note : rep.notes) {
                std::cout << "    note: " << note << '\n';
            }
        }
    }
    return all_ok ? 0 : 1;
}
