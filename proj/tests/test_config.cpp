#include <doctest.h>

#include "formbound/config.hpp"
#include "formbound/errors.hpp"
#include "formbound/report.hpp"
#include "formbound/toml.hpp"

using namespace formbound;

TEST_CASE("toml: values, tables, arrays of tables") {
    const std::string text = R"(
# top comment
seed = 42
ratio = 1.5e-3
label = "hello # not a comment"
flag = true
vals = [1.0, 2.0, 3.5]   # trailing comment

[grid]
d = 3
n = 32

[[drift]]
name = "a"
c = 0.2

[[drift]]
name = "b"
amplitude = 0.5
)";
    const toml::Table t = toml::parse(text);
    CHECK(toml::get_int(t, "seed", 0) == 42);
    CHECK(toml::get_double(t, "ratio", 0) == doctest::Approx(1.5e-3));
    CHECK(toml::get_string(t, "label", "") == "hello # not a comment");
    CHECK(toml::get_bool(t, "flag", false));
    CHECK(toml::get_double_array(t, "vals", {}) == std::vector<double>{1.0, 2.0, 3.5});
    CHECK(toml::find(t, "grid")->as_table().at("n").as_int() == 32);
    const toml::Array& drifts = toml::find(t, "drift")->as_array();
    REQUIRE(drifts.size() == 2);
    CHECK(drifts[0].as_table().at("name").as_string() == "a");
    CHECK(drifts[1].as_table().at("amplitude").as_double() == doctest::Approx(0.5));
}

TEST_CASE("toml: parse errors carry line numbers") {
    try {
        (void)toml::parse("a = 1\nb = \nc = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        (void)toml::parse("x = 1\nx = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS((void)toml::parse("q = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS((void)toml::parse("[bad\n"), ConfigError);
    CHECK_THROWS_AS((void)toml::parse("v = 1.2.3\n"), ConfigError);
}

TEST_CASE("toml: serialize/parse round trip is the identity") {
    const toml::Table t = toml::parse(R"(
x = -3
y = 0.125
inf_val = inf
s = "with \"quotes\" and \n"
arr = [1, 2.5, "three", true]
[sub]
k = 7
[[items]]
a = 1.0
[[items]]
a = 2.0
)");
    const std::string text1 = toml::serialize(t);
    const toml::Table t2 = toml::parse(text1);
    CHECK(t == t2);
    CHECK(toml::serialize(t2) == text1);
}

TEST_CASE("config round-trips through TOML") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.seed = 1234;
    cfg.grid.n = 16;
    cfg.p_list = {2.0, 2.5};
    cfg.tol.rule = ProductRule::pointwise;
    cfg.drifts[0].mollification = {4.0, 0.01};
    const toml::Table t = cfg.to_toml();
    const ExperimentConfig back = ExperimentConfig::from_toml(t);
    CHECK(back.to_toml() == t);
    CHECK(back.seed == 1234);
    CHECK(back.tol.rule == ProductRule::pointwise);
    CHECK(back.drifts[0].mollification.cutoff == 4.0);

    // full text round trip
    const ExperimentConfig back2 =
        ExperimentConfig::from_toml(toml::parse(toml::serialize(t)));
    CHECK(back2.to_toml() == t);
}

TEST_CASE("config validation re-checks admissibility at load") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.grid.d = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig::defaults();
    cfg.p_list = {1.5};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig::defaults();
    cfg.drifts[0].c = 0.45;  // delta = 0.81, p < 2/0.9 = 2.22
    cfg.p_list = {2.0, 3.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.p_list = {2.0};
    CHECK_NOTHROW(cfg.validate());

    cfg = ExperimentConfig::defaults();
    cfg.q = cfg.r;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig::defaults();
    cfg.calibration_grid = {4.0, 2.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("drift kind names round trip") {
    for (DriftKind k : {DriftKind::hardy, DriftKind::smooth_trig, DriftKind::file})
        CHECK(drift_kind_from_name(drift_kind_name(k)) == k);
    CHECK_THROWS_AS((void)drift_kind_from_name("bogus"), ConfigError);
}

TEST_CASE("report JSON and markdown rendering") {
    DiagnosticsReport rep;
    rep.version = "test";
    rep.config = ExperimentConfig::defaults();
    CheckRecord ok;
    ok.name = "demo.pass";
    ok.measured["value"] = 0.5;
    ok.bound = 1.0;
    ok.has_bound = true;
    ok.passed = true;
    CheckRecord bad;
    bad.name = "demo.fail";
    bad.passed = false;
    bad.note = "intentional";
    rep.checks = {ok, bad};
    CHECK_FALSE(rep.all_passed());
    CHECK_FALSE(rep.any_divergence());

    const std::string js = rep.to_json();
    CHECK(js.find("\"demo.pass\"") != std::string::npos);
    CHECK(js.find("config_toml") != std::string::npos);

    const std::string md = render_markdown(js);
    CHECK(md.find("| demo.pass |") != std::string::npos);
    CHECK(md.find("FAIL") != std::string::npos);

    const std::string csv = rep.checks_csv();
    CHECK(csv.find("demo.fail") != std::string::npos);

    // runtime fields are volatile and excluded from the measured view
    CHECK(rep.to_json().find("runtime_s") != std::string::npos);
    CHECK(rep.to_json_measured().find("runtime_s") == std::string::npos);
}
