#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "formbound/drift.hpp"
#include "formbound/resolvent.hpp"
#include "formbound/toml.hpp"

namespace formbound {

struct GridConfig {
    int d = 3;
    int n = 32;
    double L = 10.0;
};

struct OpNormOptions {
    int probes = 4;
    int iters = 20;
    double rtol = 1e-4;
};

struct FormBoundOptions {
    int probes = 4;
    int iters = 150;
    double rtol = 1e-10;
};

struct SemigroupOptions {
    double t = 0.1;
    int steps = 32;
    std::vector<double> trotter_cutoffs{1.0, 2.0, 4.0, 1e6};
    std::vector<double> trotter_epsilons{0.1, 0.02, 0.004, 0.0};
};

/// Everything one run needs; round-trips through TOML.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out_dir = "out";

    GridConfig grid;
    Tolerances tol;
    double quad_rtol = 1e-8;
    OpNormOptions opnorm;
    FormBoundOptions form_bound;
    SemigroupOptions semigroup;

    std::vector<double> p_list{2.0, 3.0};
    std::vector<double> mu_list{100.0, 1000.0};
    double r = 2.5;
    double q = 6.0;
    std::vector<double> calibration_grid{0.5, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

    std::vector<DriftSpec> drifts;
    std::vector<std::string> suites{"all"};
    std::vector<double> sweep_values;

    static ExperimentConfig defaults();  // the stock catalog
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_toml(const toml::Table& t);
    toml::Table to_toml() const;

    /// Re-validates every load-time admissibility constraint; throws
    /// ConfigError.
    void validate() const;
};

std::string drift_kind_name(DriftKind k);
DriftKind drift_kind_from_name(const std::string& s);

}  // namespace formbound
