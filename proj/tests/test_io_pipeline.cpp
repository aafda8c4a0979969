#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "ccy/pipeline.hpp"

using namespace ccy;

namespace {

const std::string kData = CCY_DATA_DIR;

json strip_timing(json j) {
    j.erase("timing_seconds");
    return j;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(CCY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("cone file parsing") {
    auto in = load_cone_file(kData + "/conifold.json");
    CHECK(in.dim == 3);
    CHECK(in.rays.size() == 4);
    CHECK_THROWS_AS(load_cone_file(kData + "/missing.json"), io_error);

    // rationals as strings and decimals
    json j = {{"dim", 2}, {"rays", {{1, 0}, {0, 1}}}, {"xi", {"3/2", 0.5}}, {"l", {1, 1}}};
    auto in2 = parse_cone_json(j);
    REQUIRE(in2.xi.has_value());
    CHECK((*in2.xi)[0] == doctest::Approx(1.5));
    CHECK((*in2.xi)[1] == doctest::Approx(0.5));
    REQUIRE(in2.l.has_value());
    CHECK((*in2.l)[0] == Rational(1));
}

TEST_CASE("solved instance round-trips bit-exactly") {
    Polytope q{1, {{-1.0}, {1.0}}};
    auto sample = sample_slopes(q, 32);
    auto sol = minimize_ding(sample.slopes, sample.weights, 2.0);
    SolvedInstance inst{2.0, sol, q, {{0.5, -0.5}}, {1.0, 1.0}, {Rational(1), Rational(1)}};
    json j = solved_to_json(inst);
    auto back = solved_from_json(j);
    json j2 = solved_to_json(back);
    CHECK(j.dump() == j2.dump()); // bit-exact through shortest-round-trip doubles
    CHECK(back.sol.phi.intercepts == sol.phi.intercepts);
    CHECK(back.sol.ding.total == sol.ding.total);
}

TEST_CASE("pipeline reports are deterministic and self-consistent") {
    RunConfig cfg;
    cfg.cone_path = kData + "/quadrant2.json";
    cfg.mode = RunMode::cy;
    cfg.resolution = 64;
    cfg.seed = 11;
    auto r1 = run_pipeline(cfg);
    auto r2 = run_pipeline(cfg);
    CHECK(r1.converged);
    CHECK(strip_timing(r1.report).dump() == strip_timing(r2.report).dump());

    // v_char = m! v_vol
    double v_vol = r1.report.at("v_vol").get<double>();
    double v_char = r1.report.at("v_char").get<double>();
    CHECK(std::fabs(v_char - 2.0 * v_vol) <= 1e-9);
    // quadrant minimizer
    auto xi = r1.report.at("xi_star").get<Vec>();
    CHECK(std::fabs(xi[0] - 1.0) <= 1e-8);
    CHECK(std::fabs(xi[1] - 1.0) <= 1e-8);
    CHECK(r1.report.at("ma").at("mass_residual").get<double>() <= 1e-3);

    // report file round-trip reproduces all numeric fields bit-exactly
    cfg.report_path = "/tmp/ccy_test_report.json";
    auto r3 = run_pipeline(cfg);
    json loaded = read_json_file(cfg.report_path);
    CHECK(strip_timing(loaded).dump() == strip_timing(r3.report).dump());
}

TEST_CASE("bundled cones run end to end") {
    SUBCASE("conifold") {
        RunConfig cfg;
        cfg.cone_path = kData + "/conifold.json";
        cfg.mode = RunMode::cy;
        cfg.resolution = 28;
        auto r = run_pipeline(cfg);
        CHECK(r.converged);
        auto xi = r.report.at("xi_star").get<Vec>();
        CHECK(std::fabs(xi[0]) <= 1e-8);
        CHECK(std::fabs(xi[1]) <= 1e-8);
        CHECK(std::fabs(xi[2] - 1.5) <= 1e-8);
        CHECK(r.report.at("ma").at("mass_residual").get<double>() <= 1e-3);
        CHECK(r.report.at("linf_certificate").at("passes").get<bool>());
    }
    SUBCASE("c3z2 minimizer is symmetric under the exchange involution") {
        RunConfig cfg;
        cfg.cone_path = kData + "/c3z2.json";
        cfg.mode = RunMode::cy;
        cfg.resolution = 28;
        auto r = run_pipeline(cfg);
        CHECK(r.converged);
        auto xi = r.report.at("xi_star").get<Vec>();
        // z2 <-> z3 exchange fixes xi2 = xi3 in these coordinates
        CHECK(std::fabs(xi[2] - xi[1]) <= 1e-8);
        CHECK(std::fabs(xi[0] - 1.0) <= 1e-8);
        CHECK(std::fabs(xi[1] - 2.0) <= 1e-8);
        CHECK(r.report.at("ma").at("mass_residual").get<double>() <= 1e-3);
    }
    SUBCASE("quadrant3") {
        RunConfig cfg;
        cfg.cone_path = kData + "/quadrant3.json";
        cfg.mode = RunMode::minimize_volume;
        auto r = run_pipeline(cfg);
        CHECK(r.converged);
        auto xi = r.report.at("xi_star").get<Vec>();
        for (int i = 0; i < 3; ++i) CHECK(std::fabs(xi[i] - 1.0) <= 1e-8);
    }
}

TEST_CASE("csv emission") {
    Polytope q{1, {{-1.0}, {1.0}}};
    auto sample = sample_slopes(q, 400);
    auto sol = minimize_ding(sample.slopes, sample.weights, 2.0);
    emit_csv(sol.phi, q, 2.0, 5.0, 101, "/tmp/ccy_test_grid.csv");
    std::ifstream f("/tmp/ccy_test_grid.csv");
    REQUIRE(f.good());
    std::string line;
    int rows = 0;
    std::getline(f, line);
    CHECK(line == "s1,phi,phi_Q,density");
    double max_gap = 0;
    while (std::getline(f, line)) {
        ++rows;
        auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
        double phi = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        double phiq = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        max_gap = std::max(max_gap, std::fabs(phi - phiq));
    }
    CHECK(rows == 101);
    // |phi - phi_Q| stays within log 2 + solver error
    CHECK(max_gap <= std::log(2.0) + 5e-3);

    emit_csv(sol.phi, q, 2.0, 5.0, 0, "/tmp/ccy_test_empty.csv");
    std::ifstream g("/tmp/ccy_test_empty.csv");
    std::getline(g, line);
    CHECK(line == "s1,phi,phi_Q,density");
    CHECK_FALSE(std::getline(g, line));
}

TEST_CASE("cli exit codes") {
    // structural error: line through the cone
    std::ofstream bad("/tmp/ccy_bad_cone.json");
    bad << R"({"dim": 2, "rays": [[1, 0], [-1, 0], [0, 1]]})";
    bad.close();
    CHECK(run_cli("validate --cone /tmp/ccy_bad_cone.json") == 2);

    // io error
    CHECK(run_cli("validate --cone /tmp/ccy_missing_cone.json") == 3);

    // success
    CHECK(run_cli("validate --cone " + kData + "/quadrant2.json --quiet") == 0);
    CHECK(run_cli("minimize-volume --cone " + kData + "/conifold.json --quiet") == 0);

    // not gorenstein: structural, exit 2
    std::ofstream ng("/tmp/ccy_not_gorenstein.json");
    ng << R"({"dim": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]})";
    ng.close();
    CHECK(run_cli("minimize-volume --cone /tmp/ccy_not_gorenstein.json") == 2);

    // non-minimizing xi: solve-ma runs the divergence certificate, exit 1
    CHECK(run_cli("solve-ma --cone " + kData + "/quadrant2.json --xi 3/2,1/2 --resolution 32 "
                  "--quiet") == 1);

    // full pipeline on the bundled quadrant
    CHECK(run_cli("cy --cone " + kData + "/quadrant2.json --resolution 64 --quiet") == 0);

    // solve then certify through the CLI round trip
    CHECK(run_cli("solve-ma --cone " + kData + "/quadrant2.json --resolution 300 "
                  "--out /tmp/ccy_sol.json --quiet") == 0);
    CHECK(run_cli("certify --solution /tmp/ccy_sol.json --cone " + kData +
                  "/quadrant2.json --q 2 --quiet") == 0);
    CHECK(run_cli("--version") == 0);
}

TEST_CASE("cli determinism across processes") {
    std::string out1 = "/tmp/ccy_rep1.json", out2 = "/tmp/ccy_rep2.json";
    std::string base = "cy --cone " + kData + "/quadrant2.json --resolution 48 --seed 7 --quiet";
    CHECK(run_cli(base + " --report " + out1) == 0);
    CHECK(run_cli(base + " --report " + out2) == 0);
    json a = strip_timing(read_json_file(out1));
    json b = strip_timing(read_json_file(out2));
    CHECK(a.dump() == b.dump());
}
