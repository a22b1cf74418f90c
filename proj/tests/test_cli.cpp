#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run crgeo(const std::string& args) {
    Run r;
    const std::string cmd = std::string("'") + CRGEO_BIN + "' " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    const int st = pclose(f);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

json report(const std::string& args, int expect) {
    const auto r = crgeo(args);
    INFO(args);
    CHECK(r.status == expect);
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("check-soliton on the pseudo Gaussian") {
    const auto rep = report("check-soliton --model heisenberg_gaussian --mu 1 --seed 7", 0);
    CHECK(rep["schema"] == "crgeo-report/1");
    CHECK(rep["tool"]["name"] == "crgeo");
    CHECK(rep["model"]["params"]["mu"] == 1.0);
    CHECK(rep["pass"] == true);
    REQUIRE(!rep["checks"].empty());
    for (const auto& c : rep["checks"]) {
        CHECK(c["residual"].get<double>() < 1e-9);
        CHECK(c["seed"] == 7);
        CHECK(c["samples"] == 256);
        CHECK(!c["anchor"].get<std::string>().empty());
    }
}

TEST_CASE("curvature report at a point of the sphere") {
    const auto rep = report("curvature --model cr_sphere --point 0.1,0.2,0.3", 0);
    const auto& p = rep["data"]["curvature"]["at_point"];
    CHECK(p["W"].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
    for (const char* k : {"A11", "Q11", "R1"}) {
        CHECK(std::abs(p[k]["re"].get<double>()) < 1e-9);
        CHECK(std::abs(p[k]["im"].get<double>()) < 1e-9);
    }
    CHECK(std::abs(p["Q"].get<double>()) < 1e-9);
    CHECK(p["point"][2] == 0.3);
}

TEST_CASE("level-sets table on the pseudo Gaussian") {
    // exits 1: the Delta phi = Delta_b phi row is reported and fails
    const auto rep = report("level-sets --model heisenberg_gaussian --mu 1 --lambda 1 --levels 0.5,1,2", 1);
    const auto& table = rep["data"]["level-sets"]["table"];
    REQUIRE(table.size() == 3);
    for (const auto& row : table) {
        CHECK(row["K_max"].get<double>() < 1e-7);
        CHECK(row["II23"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
        const double c = row["c"];
        CHECK(row["grad_norm"].get<double>() == doctest::Approx(std::sqrt(4 * c)).epsilon(1e-9));
    }
    for (const auto& c : rep["checks"]) {
        const std::string name = c["name"];
        INFO(name);
        CHECK(c["pass"] == (name.find("laplacian_equals_sub_laplacian") == std::string::npos));
    }
}

TEST_CASE("overall pass equals the conjunction of entries") {
    for (const char* args : {"validate --model heisenberg", "harnack --model heisenberg_contact --mu 2",
                             "check-soliton --model heisenberg_gaussian --mu 1 --tolerance 1e-30"}) {
        const auto r = crgeo(args);
        const auto rep = json::parse(r.out);
        bool all = true;
        for (const auto& c : rep["checks"]) all = all && c["pass"].get<bool>();
        INFO(args);
        CHECK(rep["pass"] == all);
        CHECK(r.status == (all ? 0 : 1));
    }
}

TEST_CASE("tolerance override can fail a passing report") {
    const auto rep = report("adapted-metric --model cr_sphere --lambda 1 --samples 16 --tolerance 1e-30", 1);
    CHECK(rep["pass"] == false);
    CHECK(rep["config"]["tolerance_override"] == 1e-30);
}

TEST_CASE("usage and model errors map to exit codes") {
    CHECK(crgeo("").status == 2);
    CHECK(crgeo("frobnicate --model heisenberg").status == 2);
    CHECK(crgeo("validate").status == 2);
    CHECK(crgeo("validate --model heisenberg --model-file x.model").status == 2);
    CHECK(crgeo("curvature --model heisenberg --point 1,2").status == 2);
    CHECK(crgeo("validate --model heisenberg_gaussian --mu abc").status == 2);
    CHECK(crgeo("check-soliton --model heisenberg").status == 2);  // no potential declared
    CHECK(crgeo("validate --model nosuch").status == 3);
    CHECK(crgeo("validate --model heisenberg_gaussian").status == 3);  // mu missing
    CHECK(crgeo("validate --model-file /nonexistent.model").status == 3);
}

TEST_CASE("model files and parameter overrides") {
    const std::string file = std::string(CRGEO_SOURCE_DIR) + "/models/cr_sphere.model";
    const auto rep = report("validate --model-file '" + file + "' --samples 32", 0);
    CHECK(rep["model"]["source"] == file);
    const auto r = report("check-soliton --model heisenberg_contact --mu -0.5 --samples 32", 0);
    CHECK(r["model"]["params"]["mu"] == -0.5);
    CHECK(r["data"]["check-soliton"]["type"] == "expanding");
}

TEST_CASE("text output and --output file") {
    const auto t = crgeo("validate --model heisenberg --samples 16 --text");
    CHECK(t.status == 0);
    CHECK(t.out.find("PASS") != std::string::npos);
    const std::string path = "cli_test_output.json";
    const auto r = crgeo("validate --model heisenberg --samples 16 --output " + path);
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    CHECK(json::parse(in)["command"] == "validate");
    std::remove(path.c_str());
}

TEST_CASE("critical-set report on the pseudo Gaussian") {
    const auto rep = report("critical-set --model heisenberg_gaussian --mu 1", 0);
    const auto& d = rep["data"]["critical-set"];
    REQUIRE(d["components"].size() == 1);
    CHECK(d["components"][0]["tag"] == "line");
    CHECK(d["diffeo"]["case"] == "ii");
    CHECK(d["diffeo"]["concluded"] == "R^3");
    CHECK(d["diffeo"]["caveat"] == "hypotheses declared, not verified");
}

TEST_CASE("seeded runs are reproducible and seeds matter") {
    const auto a = crgeo("curvature --model cr_sphere --samples 32 --seed 3");
    const auto b = crgeo("curvature --model cr_sphere --samples 32 --seed 3");
    const auto c = crgeo("curvature --model cr_sphere --samples 32 --seed 4");
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
}
