#include "formbound/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "formbound/errors.hpp"
#include "formbound/toml.hpp"

namespace formbound {

using nlohmann::json;

bool DiagnosticsReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !aborted;
}

bool DiagnosticsReport::any_divergence() const {
    for (const auto& c : checks)
        if (c.divergence) return true;
    return false;
}

namespace {

json ledger_json(const ConstantsLedger& l) {
    return json{{"drift", l.drift}, {"p", l.p},       {"delta_hat", l.delta_hat},
                {"lambda", l.lambda}, {"c_delta_p", l.c_delta_p}, {"mu0", l.mu0},
                {"C1", l.C1},       {"C2", l.C2},     {"K1r", l.K1r},
                {"K2q", l.K2q},     {"K1", l.K1},     {"K2", l.K2},
                {"mu1", l.mu1}};
}

json check_json(const CheckRecord& c, bool with_runtime) {
    json j{{"name", c.name},
           {"drift", c.drift},
           {"inputs", c.inputs},
           {"measured", c.measured},
           {"passed", c.passed},
           {"divergence", c.divergence}};
    if (c.has_bound) j["bound"] = c.bound;
    if (!c.note.empty()) j["note"] = c.note;
    if (with_runtime) j["runtime_s"] = c.runtime_s;
    return j;
}

json report_json(const DiagnosticsReport& r, bool with_runtime) {
    json j;
    j["version"] = r.version;
    j["seed"] = r.config.seed;
    j["grid"] = {{"d", r.config.grid.d}, {"n", r.config.grid.n}, {"L", r.config.grid.L}};
    j["config_toml"] = toml::serialize(r.config.to_toml());
    j["aborted"] = r.aborted;
    j["all_passed"] = r.all_passed();
    json ls = json::array();
    for (const auto& l : r.ledgers) ls.push_back(ledger_json(l));
    j["constants"] = ls;
    json cs = json::array();
    for (const auto& c : r.checks) cs.push_back(check_json(c, with_runtime));
    j["checks"] = cs;
    return j;
}

}  // namespace

std::string DiagnosticsReport::to_json() const { return report_json(*this, true).dump(2); }

std::string DiagnosticsReport::to_json_measured() const {
    return report_json(*this, false).dump(2);
}

std::string DiagnosticsReport::checks_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "name,drift,passed,divergence,bound,measured,runtime_s,note\n";
    for (const auto& c : checks) {
        // flatten measured map as key=value pairs separated by ';'
        std::string kv;
        for (const auto& [k, v] : c.measured) {
            if (!kv.empty()) kv += ";";
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << k << "=" << v;
            kv += tmp.str();
        }
        os << c.name << "," << c.drift << "," << (c.passed ? 1 : 0) << ","
           << (c.divergence ? 1 : 0) << ",";
        if (c.has_bound) os << c.bound;
        os << ",\"" << kv << "\"," << c.runtime_s << ",\"" << c.note << "\"\n";
    }
    return os.str();
}

void DiagnosticsReport::write(const std::string& out_dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto dump = [&](const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(out_dir) / name);
        if (!os) throw IoError("cannot write " + name + " in " + out_dir);
        os << text;
    };
    dump("report.json", to_json());
    dump("report_measured.json", to_json_measured());
    dump("checks.csv", checks_csv());
}

std::string render_markdown(const std::string& report_json_text) {
    json j = json::parse(report_json_text);
    std::ostringstream os;
    os << "# formbound diagnostics report\n\n";
    os << "- version: " << j.value("version", std::string("?")) << "\n";
    os << "- seed: " << j.value("seed", 0ULL) << "\n";
    if (j.contains("grid"))
        os << "- grid: d=" << j["grid"]["d"] << " n=" << j["grid"]["n"]
           << " L=" << j["grid"]["L"] << "\n";
    os << "- all passed: " << (j.value("all_passed", false) ? "yes" : "no") << "\n\n";

    if (j.contains("constants") && !j["constants"].empty()) {
        os << "## Constants ledger\n\n";
        os << "| drift | p | delta_hat | c_delta_p | mu0 | C1 | C2 | K1r | K2q | K1 | K2 |\n";
        os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& l : j["constants"]) {
            os << "| " << l.value("drift", std::string()) << " | " << l.value("p", 0.0)
               << " | " << l.value("delta_hat", 0.0) << " | " << l.value("c_delta_p", 0.0)
               << " | " << l.value("mu0", 0.0) << " | " << l.value("C1", 0.0) << " | "
               << l.value("C2", 0.0) << " | " << l.value("K1r", 0.0) << " | "
               << l.value("K2q", 0.0) << " | " << l.value("K1", 0.0) << " | "
               << l.value("K2", 0.0) << " |\n";
        }
        os << "\n";
    }

    os << "## Checks\n\n";
    os << "| check | drift | status | bound | note |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& c : j["checks"]) {
        os << "| " << c.value("name", std::string()) << " | "
           << c.value("drift", std::string()) << " | "
           << (c.value("passed", false) ? "pass" : "FAIL") << " | ";
        if (c.contains("bound")) os << c["bound"].get<double>();
        os << " | " << c.value("note", std::string()) << " |\n";
    }
    os << "\n";
    return os.str();
}

}  // namespace formbound
