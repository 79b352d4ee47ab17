#ifndef MSF_VERIFY_HPP
#define MSF_VERIFY_HPP

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "msf/landau.hpp"
#include "msf/specfun.hpp"

namespace msf {

/// Knobs shared by verification and tabulation. Unset optionals select the
/// suite's own parameter sweep.
struct RunConfig {
    std::optional<double> mu;
    int l0 = 0;
    double gamma = 1.0;
    std::optional<int> vartheta;
    double mass = 1.0;
    /// Overrides every check tolerance when set.
    std::optional<double> tol;
    /// Gauss-Laguerre nodes for the (u, v) integrals.
    int nodes = 48;
    specfun::SeriesControl series;
    std::string format = "csv";
    bool timing = false;

    void validate() const;
    FieldConfig field(double mu_value) const;
};

struct CheckRecord {
    std::string name;
    std::string params;
    double achieved_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckRecord> records;
    std::vector<std::pair<std::string, std::string>> environment;
    std::vector<std::string> notes;
    double wall_time = 0.0;

    bool all_pass() const;
};

const std::vector<std::string>& suite_names();

/// Runs one suite (or "all"); throws UsageError for an unknown name.
VerificationReport verify_suite(const RunConfig& config, const std::string& suite);

/// start:stop:step with stop included (to 1e-9 of a step), or one number.
std::vector<double> parse_axis(const std::string& spec);

struct TabulateSpec {
    std::string target;
    /// Axis name -> start:stop:step.
    std::vector<std::pair<std::string, std::string>> axes;
    int j = 1;  // coherent-state branch
    int l = 0;
    int m = 0;
    int lmax = 5;
    int mmax = 5;
    double tau = 0.1;
    double dtheta = 0.0;
    cplx z1 = 0.0;
    cplx z2 = 0.0;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

const std::vector<std::string>& tabulate_targets();

/// Tabulates target over the Cartesian product of its axes (first axis
/// slowest). Throws UsageError for unknown targets or missing axes.
Table tabulate(const RunConfig& config, const TabulateSpec& spec);

/// CSV with 12 significant digits, JSON with 17; LF line endings.
void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t, const std::vector<std::pair<std::string, std::string>>& meta);
void write_report_csv(std::ostream& os, const VerificationReport& r, bool timing);
void write_report_json(std::ostream& os, const VerificationReport& r, bool timing);

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
/// Results must be written by index; the first exception by index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace msf

#endif
