#pragma once

#include "formbound/report.hpp"

namespace formbound {

struct SuiteResult {
    DiagnosticsReport report;
    int exit_code = 0;  // 0 pass, 1 failure, 2 usage/config, 3 divergence signal
};

/// Executes the selected check suites in dependency order (form bounds ->
/// mu0 calibration -> resolvent -> semigroup -> regularity). A calibration
/// failure aborts with a partial report.
SuiteResult run_suite(const ExperimentConfig& cfg);

/// One CSV table per sweep axis ("mu", "delta", "p", "n"); empty axis value
/// lists give a header-only table.
std::string sweep_csv(const ExperimentConfig& cfg, const std::string& axis);

}  // namespace formbound
