#pragma once

#include <map>
#include <string>
#include <vector>

#include "formbound/config.hpp"
#include "formbound/constants.hpp"

namespace formbound {

/// One executed check. pass/fail is derived from measured values against the
/// bound inside the check itself, never set by hand afterwards.
struct CheckRecord {
    std::string name;
    std::string drift;
    std::map<std::string, double> inputs;
    std::map<std::string, double> measured;
    double bound = 0.0;
    bool has_bound = false;
    bool passed = false;
    bool divergence = false;
    double runtime_s = 0.0;
    std::string note;
};

struct DiagnosticsReport {
    std::string version;
    ExperimentConfig config;
    std::vector<ConstantsLedger> ledgers;
    std::vector<CheckRecord> checks;
    bool aborted = false;  // calibration failure stops the suite early

    bool all_passed() const;
    bool any_divergence() const;

    std::string to_json() const;
    /// Same JSON with runtimes stripped: the bit-exact reproducibility view.
    std::string to_json_measured() const;
    std::string checks_csv() const;

    /// Writes report.json, report_measured.json and checks.csv.
    void write(const std::string& out_dir) const;
};

/// Render a report JSON document as a markdown summary.
std::string render_markdown(const std::string& report_json);

}  // namespace formbound
