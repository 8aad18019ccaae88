#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fdtk/report.hpp"

using namespace fdtk;
namespace fs = std::filesystem;

namespace {

JobConfig config_from_text(const std::string& text) {
    return parse_job_config(json::parse(text));
}

fs::path scratch_dir(const std::string& leaf) {
    fs::path dir = fs::temp_directory_path() / "fdtk-tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("job config validation") {
    SUBCASE("minimal criterion job") {
        auto cfg = config_from_text(R"({
            "command": "criterion",
            "subject": {"type": "power_log", "c": 1, "gamma": 0, "s": 2, "n": 3},
            "n": 3})");
        CHECK(cfg.command == "criterion");
        CHECK(cfg.n == 3);
        CHECK(cfg.workers == 1);
    }
    SUBCASE("options block") {
        auto cfg = config_from_text(R"({
            "command": "reproduce",
            "options": {"quad_order": 8, "eps_decades": 6, "eps0": 0.25,
                        "seed": 7, "workers": 4}})");
        CHECK(cfg.quad_order == 8);
        CHECK(cfg.eps_decades == 6);
        CHECK(cfg.eps0 == 0.25);
        CHECK(cfg.seed == 7u);
        CHECK(cfg.workers == 4);
    }
    SUBCASE("unknown keys are rejected everywhere") {
        CHECK_THROWS_AS(config_from_text(R"({"command": "reproduce", "bogus": 1})"),
                        ValidationError);
        CHECK_THROWS_AS(config_from_text(
                            R"({"command": "reproduce", "options": {"threads": 2}})"),
                        ValidationError);
        CHECK_THROWS_AS(
            parse_map_spec(json::parse(R"({"type": "twist", "m": 2, "n": 3, "x": 1})")),
            ValidationError);
        CHECK_THROWS_AS(
            parse_qfield(json::parse(R"({"type": "power_log", "n": 3, "beta": 1})")),
            ValidationError);
    }
    SUBCASE("unknown command and bad dimension") {
        CHECK_THROWS_AS(config_from_text(R"({"command": "explode"})"), ValidationError);
        CHECK_THROWS_AS(config_from_text(R"({"command": "criterion", "n": 1})"),
                        ValidationError);
    }
}

TEST_CASE("subject parsing") {
    SUBCASE("map specs") {
        MapSpec radial = parse_map_spec(json::parse(
            R"({"type": "radial", "n": 3,
                "profile": {"type": "power_shift", "alpha": 0.5}})"));
        CHECK(map_dimension(radial) == 3);
        CHECK(std::holds_alternative<RadialMap>(radial));
        MapSpec twist = parse_map_spec(json::parse(R"({"type": "twist", "m": 4, "n": 5})"));
        CHECK(map_metadata(twist).multiplicity == 4);
        CHECK_THROWS_AS(parse_map_spec(json::parse(R"({"type": "spiral"})")),
                        ValidationError);
        CHECK_THROWS_AS(parse_profile(json::parse(R"({"type": "power_shift"})")),
                        ValidationError);
    }
    SUBCASE("fields, including the inverse exponent shorthand") {
        QField f = parse_qfield(json::parse(
            R"({"type": "from_map", "exponent": "inverse",
                "map": {"type": "radial", "n": 4,
                        "profile": {"type": "power_shift", "alpha": 0.5}}})"));
        const auto& fm = std::get<FromMapField>(f);
        CHECK(fm.exponent == doctest::Approx(1.0 / 3.0));
        QField logf = parse_qfield(json::parse(R"({"type": "log_radial", "n": 3})"));
        CHECK(radial_value(logf, 0.1) == doctest::Approx(std::log(10.0)));
        CHECK_THROWS_AS(
            parse_qfield(json::parse(R"({"type": "power_log", "c": -1, "n": 3})")),
            ValidationError);
    }
}

TEST_CASE("run_job: criterion") {
    auto cfg = config_from_text(R"({
        "command": "criterion", "n": 3,
        "subject": {"type": "power_log", "c": 1, "gamma": 0, "s": 2, "n": 3},
        "phi": {"p": 3},
        "hypotheses": {"bounded": true, "open_discrete_closed": true,
                       "limit_sets_disjoint": true}})");
    ReportBundle b = run_job(cfg);
    const json& res = b.report["result"];
    CHECK(res["divergence"]["verdict"] == "Diverges");
    CHECK(res["divergence"]["method"] == "Symbolic");
    CHECK(res["extendable_by_theorem"] == true);
    CHECK(res["calderon"]["holds"] == true);
    CHECK(b.csv.count("trace-criterion.csv") == 1);
}

TEST_CASE("run_job: modulus ring (1, e)") {
    auto cfg = config_from_text(R"({"command": "modulus", "n": 3, "ring": [1.0, 2.718281828459045]})");
    ReportBundle b = run_job(cfg);
    const json& res = b.report["result"];
    CHECK(res["capacity"]["value"].get<Real>() == doctest::Approx(4 * M_PI).epsilon(1e-9));
    CHECK(res["capacity"]["method"] == "Symbolic");
    CHECK(res["duality_ok"] == true);
    CHECK(res["oracle"]["value"].get<Real>() ==
          doctest::Approx(4 * M_PI).epsilon(0.01));
    CHECK(b.csv.at("trace-modulus.csv").find("variational_oracle") != std::string::npos);
    CHECK_THROWS_AS(run_job(config_from_text(R"({"command": "modulus", "n": 3})")),
                    ValidationError);
}

TEST_CASE("run_job: analyze power shift at |x| = 0.25") {
    auto cfg = config_from_text(R"({
        "command": "analyze", "n": 3,
        "subject": {"type": "radial", "n": 3,
                    "profile": {"type": "power_shift", "alpha": 0.5}},
        "radii": [0.25]})");
    ReportBundle b = run_job(cfg);
    const json& row = b.report["result"]["samples"][0];
    CHECK(row["K_I"].get<Real>() == doctest::Approx(36.0).epsilon(1e-10));
    CHECK(b.report["result"]["metadata"]["multiplicity"] == 1);
    const std::string& csv = b.csv.at("trace-analyze.csv");
    CHECK(csv.find("r,K_I,") == 0);
    CHECK(csv.find("36") != std::string::npos);
}

TEST_CASE("run_job: fmo verdict for the model log field") {
    auto cfg = config_from_text(R"({
        "command": "fmo", "n": 3,
        "subject": {"type": "log_radial", "n": 3}})");
    ReportBundle b = run_job(cfg);
    CHECK(b.report["result"]["verdict"] == "FMO");
    CHECK(b.csv.at("trace-fmo.csv").find("epsilon,oscillation") == 0);
}

TEST_CASE("determinism of reports and traces") {
    SUBCASE("identical configs give identical bytes") {
        const char* text = R"({
            "command": "criterion", "n": 3,
            "subject": {"type": "tabulated", "n": 3,
                        "radii": [1e-6, 1e-4, 1e-2, 0.5, 1.0],
                        "values": [1.0, 1.0, 1.0, 1.0, 1.0]}})";
        ReportBundle a = run_job(config_from_text(text));
        ReportBundle b = run_job(config_from_text(text));
        CHECK(a.report.dump() == b.report.dump());
        REQUIRE(a.csv.size() == b.csv.size());
        for (const auto& [name, bytes] : a.csv) CHECK(b.csv.at(name) == bytes);
    }
    SUBCASE("reproduce suite: 1 worker vs 8 workers, identical CSV") {
        auto rows1 = reproduce_paper(3, 1);
        auto rows8 = reproduce_paper(3, 8);
        CHECK(suite_csv(rows1) == suite_csv(rows8));
        for (const auto& r : rows1) CHECK(r.pass);
    }
}

TEST_CASE("report bundle writes report.json and traces") {
    fs::path dir = scratch_dir("bundle");
    ReportBundle b = run_job(config_from_text(
        R"({"command": "modulus", "n": 3, "ring": [0.5, 1.5]})"));
    b.write(dir);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "trace-modulus.csv"));
    std::ifstream in(dir / "report.json");
    json round_trip = json::parse(in);
    CHECK(round_trip["command"] == "modulus");
}

TEST_CASE("fdtool exit codes") {
    fs::path dir = scratch_dir("cli");
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(FDTOOL_PATH) + " " + args + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    SUBCASE("valid job: 0") {
        std::ofstream(dir / "ok.json")
            << R"({"command": "modulus", "n": 3, "ring": [1.0, 2.0]})";
        CHECK(run("--config " + (dir / "ok.json").string() + " --out " +
                  (dir / "out").string()) == 0);
        CHECK(fs::exists(dir / "out" / "report.json"));
    }
    SUBCASE("validation failures: 2") {
        std::ofstream(dir / "bad-key.json") << R"({"command": "reproduce", "oops": 1})";
        CHECK(run("--config " + (dir / "bad-key.json").string()) == 2);
        std::ofstream(dir / "bad-json.json") << "{nonsense";
        CHECK(run("--config " + (dir / "bad-json.json").string()) == 2);
        CHECK(run("--config " + (dir / "missing.json").string()) == 2);
    }
    SUBCASE("numeric failure surfaces as 3") {
        std::ofstream(dir / "numeric.json")
            << R"({"command": "modulus", "n": 3, "ring": [1.0, 1.0]})";
        // degenerate ring: infinite modulus surfaces as a domain error
        CHECK(run("--config " + (dir / "numeric.json").string()) == 3);
    }
}
