#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "udw/errors.hpp"
#include "udw/sweep.hpp"

using namespace udw;

namespace {

ConfigMap cfg(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// runs a check that must throw ConfigError and returns it
template <class F>
ConfigError config_error(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("unreachable");
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

const char* kBase =
    "# Minkowski point\n"
    "OmegaT = 2\n"
    "lambda = 0.1\n"
    "log10_beta = -5\n"
    "L_over_T = 7   # separation\n";

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("udw_test_" + name);
    std::ofstream(p) << text;
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(UDW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto m = cfg(kBase);
    CHECK(m.size() == 4);
    CHECK(m.at("L_over_T").value == "7");
    CHECK(m.at("OmegaT").line == 2);

    auto e = config_error([] { cfg("OmegaT = 2\nnonsense\n"); });
    CHECK(e.line == 2);
    e = config_error([] { cfg("OmegaT = 2\n\nOmegaT = 3\n"); });
    CHECK(e.line == 3);
    CHECK(e.field == "OmegaT");
    e = config_error([] { cfg("lambda =\n"); });
    CHECK(e.field == "lambda");
    CHECK_THROWS_AS(parse_config_file("/nonexistent/udw.cfg"), ConfigError);
}

TEST_CASE("scenario from config") {
    const auto s = scenario_from_config(cfg(kBase));
    CHECK(s.detector_a.Omega == 2.0);
    CHECK(s.detector_b.position[2] == 7.0);
    CHECK(s.initial.beta() == doctest::Approx(1e-5).epsilon(1e-15));
    CHECK(s.regime == Regime::Auto);
    CHECK_FALSE(s.is_shockwave());

    const auto sw = scenario_from_config(
        cfg("OmegaT = 2\nlambda = 0.1\nbeta = 1e-5\nzA_over_T = -0.5\nzB_over_T = 7\nspacetime = shockwave\n"
            "regime = weak_beta0\n"));
    REQUIRE(sw.is_shockwave());
    CHECK(std::get<Shockwave>(sw.spacetime).a == 1.0);
    CHECK(sw.detector_a.position[2] == -0.5);
    CHECK(sw.regime == Regime::WeakBeta0);
}

TEST_CASE("scenario config errors name the field and line") {
    auto e = config_error([] { scenario_from_config(cfg("lambda = 0.1\nbeta = 0\nL_over_T = 1\n")); });
    CHECK(e.field == "OmegaT");
    e = config_error([] { scenario_from_config(cfg(std::string(kBase) + "zA = 1\n")); });
    CHECK(e.field == "zA");
    CHECK(e.line == 6);
    e = config_error([] { scenario_from_config(cfg(std::string(kBase) + "beta = 0.1\n")); });
    CHECK(e.field == "beta");
    e = config_error([] { scenario_from_config(cfg(std::string(kBase) + "zB_over_T = 3\n")); });
    CHECK(e.field == "zB_over_T");
    e = config_error([] { scenario_from_config(cfg(std::string(kBase) + "aT = 1\n")); });
    CHECK(e.field == "aT");
    CHECK(e.line == 6);
    e = config_error([] { scenario_from_config(cfg("OmegaT = x\nlambda = 0.1\nbeta = 0\nL_over_T = 1\n")); });
    CHECK(e.field == "OmegaT");
    CHECK(e.line == 1);
    e = config_error([] { scenario_from_config(cfg(std::string(kBase) + "regime = weak\n")); });
    CHECK(e.field == "regime");
    e = config_error([] { scenario_from_config(cfg("OmegaT = 1\nlambda = 0.1\nalpha = 1.5\nL_over_T = 1\n")); });
    CHECK(e.field == "alpha");
}

TEST_CASE("sweep config") {
    const auto spec = sweep_from_config(cfg(
        "OmegaT = 2\nlambda = 0.1\nL_over_T = 7\nregime = weak_beta0\naxis1 = log10_beta -10 0 11\noutput = x.csv\n"));
    CHECK(spec.axis1.name == "log10_beta");
    CHECK(spec.axis1.value(0) == -10.0);
    CHECK(spec.axis1.value(10) == 0.0);
    CHECK(spec.axis1.value(5) == -5.0);
    CHECK_FALSE(spec.axis2.has_value());
    CHECK(spec.output_path == "x.csv");
    CHECK(spec.regime == "weak_beta0");

    auto e = config_error([] { sweep_from_config(cfg("OmegaT = 2\naxis1 = mass 0 1 3\n")); });
    CHECK(e.field == "mass");
    e = config_error([] { sweep_from_config(cfg("OmegaT = 2\naxis1 = OmegaT 0 1 3\n")); });
    CHECK(e.field == "OmegaT");
    e = config_error([] { sweep_from_config(cfg("lambda = 0.1\naxis1 = OmegaT 0 1\n")); });
    CHECK(e.field == "axis1");
    e = config_error([] { sweep_from_config(cfg("lambda = 0.1\naxis1 = OmegaT 0 1 2.5\n")); });
    CHECK(e.field == "axis1");
    e = config_error([] { sweep_from_config(cfg("lambda = 0.1\nbeta = 0\naxis1 = log10_beta -3 0 4\n")); });
    CHECK(e.field == "beta");
    e = config_error([] { sweep_from_config(cfg("lambda = 0.1\n")); });
    CHECK(e.field == "axis1");
}

TEST_CASE("sweep output is ordered and independent of the worker count") {
    const auto spec = sweep_from_config(
        cfg("lambda = 0.1\nlog10_beta = -8\ndt_over_T = 0\nregime = weak_beta0\n"
            "axis1 = OmegaT 0 6 7\naxis2 = L_over_T 0 4 3\n"));
    std::ostringstream one, many, again;
    run_sweep(spec, one, {1, {}});
    run_sweep(spec, many, {4, {}});
    run_sweep(spec, again, {1, {}});
    CHECK(one.str() == many.str());
    CHECK(one.str() == again.str());

    const auto rows = lines_of(one.str());
    REQUIRE(rows.size() == 1 + 21);
    CHECK(rows[0].rfind("OmegaT,lambda,", 0) == 0);
    CHECK(rows[0].find(",status") != std::string::npos);
    // axis2-major: first row block has L = 0 (degenerate for pointlike detectors)
    CHECK(rows[1].find("degenerate_separation") != std::string::npos);
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows[2].rfind("1,", 0) == 0);
    CHECK(rows[8].find(",ok") != std::string::npos);
    CHECK(rows[8].find(",2,0,") != std::string::npos);
}

TEST_CASE("presets are valid sweeps with explicit regimes") {
    const auto names = preset_names();
    CHECK(names.size() == 7);
    for (const auto& n : names) {
        const auto p = preset(n);
        CHECK_NOTHROW(p.validate());
        CHECK(p.regime != "auto");
        CHECK(p.axis1.steps >= 2);
        CHECK_FALSE(p.output_path.empty());
    }
    CHECK_THROWS(preset("fig4"));
}

TEST_CASE("reports") {
    const auto s = scenario_from_config(cfg(std::string(kBase) + "regime = weak_beta0\n"));
    const auto r = evaluate(s);
    std::ostringstream text, js;
    write_report_text(text, s, r);
    write_report_json(js, s, r);
    CHECK(text.str().find("delta = ") != std::string::npos);
    CHECK(text.str().find("regime = weak_beta0") != std::string::npos);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["report"].contains("delta"));
    CHECK(j["report"]["regime"] == "weak_beta0");
    CHECK(j["elements"]["Y_A"]["im"].is_null());

    CHECK(status_of(DivergenceError("x")) == "divergence");
    CHECK(status_of(quad::BudgetExhausted("x", 1.0)) == "budget_exhausted");
    CHECK(status_of(std::runtime_error("x")) == "error");
}

TEST_CASE("command line exit codes") {
    const auto good = temp_file("good.cfg", std::string(kBase) + "regime = weak_beta0\n");
    const auto bad = temp_file("bad.cfg", "lambda = 0.1\nbeta = 0\nL_over_T = 1\n");
    const auto gap = temp_file("gap.cfg", std::string("OmegaT = 2\nlambda = 0.1\nalpha = 0.3\nL_over_T = 7\n"));
    CHECK(run_cli("eval " + good.string()) == 0);
    CHECK(run_cli("eval " + good.string() + " --json") == 0);
    CHECK(run_cli("eval " + bad.string()) == 1);
    CHECK(run_cli("eval " + gap.string()) == 1);
    CHECK(run_cli("eval /nonexistent.cfg") == 1);
    CHECK(run_cli("preset nosuch") != 0);

    const auto sweep = temp_file("sweep.cfg", "lambda = 0.1\nL_over_T = 7\nregime = weak_beta0\nOmegaT = 2\n"
                                              "axis1 = log10_beta -6 -2 3\n");
    const auto csv = std::filesystem::temp_directory_path() / "udw_test_sweep.csv";
    CHECK(run_cli("sweep " + sweep.string() + " --out " + csv.string() + " --workers 2") == 0);
    std::ifstream in(csv);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(lines_of(ss.str()).size() == 4);
    for (const auto& p : {good, bad, gap, sweep, csv}) std::filesystem::remove(p);
}
