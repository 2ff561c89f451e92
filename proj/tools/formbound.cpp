// formbound CLI: verify / solve / sweep / calibrate / report.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage or config error,
// 3 numerical divergence signal (Neumann series outside its regime).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "formbound/errors.hpp"
#include "formbound/field_io.hpp"
#include "formbound/form_bound.hpp"
#include "formbound/report.hpp"
#include "formbound/suite.hpp"
#include "formbound/version.hpp"

namespace fs = std::filesystem;
using namespace formbound;

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> suite;
};

ExperimentConfig load_config(const GlobalFlags& g) {
    ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig::defaults()
                                                 : ExperimentConfig::from_file(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (g.threads) cfg.threads = *g.threads;
    if (!g.threads) {
        if (const char* env = std::getenv("FORMBOUND_THREADS")) cfg.threads = std::atoi(env);
    }
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (!g.suite.empty()) cfg.suites = g.suite;
    cfg.validate();
    return cfg;
}

void print_summary(const DiagnosticsReport& rep) {
    int pass = 0, fail = 0;
    for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "[pass] " : "[FAIL] ") << c.name;
        if (c.has_bound) std::cout << "  (bound " << c.bound << ")";
        if (!c.note.empty()) std::cout << "  -- " << c.note;
        std::cout << "\n";
        (c.passed ? pass : fail) += 1;
    }
    std::cout << pass << " passed, " << fail << " failed";
    if (rep.aborted) std::cout << " (suite aborted on calibration failure)";
    std::cout << std::endl;
}

int cmd_verify(const GlobalFlags& g) {
    const ExperimentConfig cfg = load_config(g);
    const SuiteResult result = run_suite(cfg);
    result.report.write(cfg.out_dir);
    print_summary(result.report);
    std::cout << "report written to " << cfg.out_dir << "/report.json" << std::endl;
    return result.exit_code;
}

int cmd_sweep(const GlobalFlags& g, const std::string& axis, const std::string& out_file) {
    const ExperimentConfig cfg = load_config(g);
    const std::string csv = sweep_csv(cfg, axis);
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        std::ofstream os(out_file);
        if (!os) throw IoError("cannot write " + out_file);
        os << csv;
    }
    return 0;
}

int cmd_calibrate(const GlobalFlags& g) {
    ExperimentConfig cfg = load_config(g);
    cfg.suites = {"drift", "resolvent"};
    const SuiteResult result = run_suite(cfg);
    result.report.write(cfg.out_dir);
    for (const auto& led : result.report.ledgers)
        std::cout << led.drift << " p=" << led.p << ": delta_hat=" << led.delta_hat
                  << " c=" << led.c_delta_p << " mu0=" << led.mu0 << "\n";
    return result.exit_code;
}

int cmd_solve(const GlobalFlags& g, const std::string& field_in,
              const std::string& field_out, const std::string& drift_name, double mu,
              double p) {
    const ExperimentConfig cfg = load_config(g);
    const ScalarField f = read_fbnd(field_in);
    const GridPtr grid = f.grid();
    const DriftSpec* spec = nullptr;
    for (const auto& s : cfg.drifts)
        if (drift_name.empty() || s.name == drift_name) {
            spec = &s;
            break;
        }
    if (!spec) throw ConfigError("drift '" + drift_name + "' not found in config");
    auto drift = std::make_shared<const DriftField>(make_drift(grid, *spec));
    ProblemPtr pr = make_problem(drift, mu, p, cfg.tol);
    const ThetaResult res = theta_apply(*pr, f);
    write_fbnd(res.u, field_out);
    std::cout << "{ \"drift\": \"" << spec->name << "\", \"mu\": " << mu
              << ", \"p\": " << p << ", \"neumann_terms\": " << res.neumann.terms_used
              << ", \"converged\": " << (res.neumann.converged ? "true" : "false")
              << ", \"diverged\": " << (res.neumann.diverged ? "true" : "false")
              << ", \"tail_bound\": " << res.neumann.tail_bound << " }" << std::endl;
    return res.neumann.diverged ? 3 : 0;
}

int cmd_report(const std::string& in_json, const std::string& out_md) {
    std::ifstream is(in_json);
    if (!is) throw IoError("cannot open " + in_json);
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string md = render_markdown(buf.str());
    if (out_md.empty()) {
        std::cout << md;
    } else {
        std::ofstream os(out_md);
        if (!os) throw IoError("cannot write " + out_md);
        os << md;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral resolvent calculus for form-bounded drifts"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "TOML experiment config");
    app.add_option("--out", g.out_dir, "output directory");
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "root RNG seed");
    int threads_val = 0;
    auto* threads_opt = app.add_option("--threads", threads_val, "worker threads");
    app.add_option("--suite", g.suite, "suite selection (spectral, drift, resolvent, semigroup, regularity, all)");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    std::string axis = "mu", sweep_out;
    auto* sweep = app.add_subcommand("sweep", "emit a CSV sweep table");
    sweep->add_option("--axis", axis, "sweep axis: mu, delta, p, n")->required();
    sweep->add_option("--csv", sweep_out, "CSV output path (stdout when empty)");
    auto* calibrate = app.add_subcommand("calibrate", "estimate form bounds and mu0");
    std::string field_in, field_out = "u.fbnd", drift_name;
    double mu = 100.0, p = 2.0;
    auto* solve = app.add_subcommand("solve", "apply Theta(mu,b) to a field");
    solve->add_option("--field", field_in, "input FBND1 field")->required();
    solve->add_option("--out-field", field_out, "output FBND1 field");
    solve->add_option("--drift", drift_name, "drift name from the config");
    solve->add_option("--mu", mu, "resolvent shift");
    solve->add_option("--p", p, "Lebesgue exponent");
    std::string report_in, report_out;
    auto* report = app.add_subcommand("report", "render a report JSON as markdown");
    report->add_option("--in", report_in, "report.json path")->required();
    report->add_option("--md", report_out, "markdown output path (stdout when empty)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (seed_opt->count()) g.seed = seed_val;
    if (threads_opt->count()) g.threads = threads_val;

    try {
        if (verify->parsed()) return cmd_verify(g);
        if (sweep->parsed()) return cmd_sweep(g, axis, sweep_out);
        if (calibrate->parsed()) return cmd_calibrate(g);
        if (solve->parsed()) return cmd_solve(g, field_in, field_out, drift_name, mu, p);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const InvalidParameter& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return 2;
    } catch (const AdmissibilityError& e) {
        std::cerr << "admissibility violation: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
