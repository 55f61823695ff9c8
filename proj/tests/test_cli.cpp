#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "doctest.h"
#include "seqtest/analysis.hpp"
#include "seqtest/cli.hpp"
#include "seqtest/penalty.hpp"

using namespace seqtest;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "seqtest");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string golden(const char* name) {
    return read_file(std::filesystem::path(SEQTEST_GOLDEN_DIR) / name);
}

std::string keys_of(const nlohmann::ordered_json& j) {
    std::string s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        s += it.key() + "\n";
    }
    return s;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        v.push_back(line);
    }
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            v.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    v.push_back(cur);
    return v;
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "seqtest_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("solve --json: schema and closed-form pi_*") {
        const auto r = run_cli({"solve", "ce:1,1", "--K", "16", "--json"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::ordered_json::parse(r.out);
        CHECK(keys_of(j) == golden("solve_keys.txt"));
        CHECK(keys_of(j["manifest"]) == golden("manifest_keys.txt"));
        CHECK(keys_of(j["solution"]) == golden("solution_keys.txt"));
        CHECK(j["solution"]["kind"] == "two_boundary");
        CHECK(j["solution"]["pi_lo"].get<double>() == doctest::Approx(0.146446609407).epsilon(1e-10));
        CHECK(j["manifest"]["params"]["K"].get<double>() == 16.0);
        CHECK(j["manifest"]["seed"].is_null());
    }

    TEST_CASE("solve: degenerate exit code") {
        const auto r = run_cli({"solve", "ce:1,1", "--K", "8"});
        CHECK(r.code == cli::kDegenerate);
        CHECK(r.out.find("degenerate") != std::string::npos);
        const auto j = run_cli({"solve", "l1", "--K", "8", "--json"});
        CHECK(j.code == cli::kDegenerate);
        CHECK(nlohmann::json::parse(j.out)["solution"]["A"].is_null());
    }

    TEST_CASE("solve: classic penalty goes through the envelope") {
        const auto r = run_cli({"solve", "classic:1,1", "--K", "16", "--json"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["solution"]["method"] == "envelope");
        CHECK(j["solution"]["A"].get<double>() == doctest::Approx(0.167031420930).epsilon(1e-8));
    }

    TEST_CASE("solve --csv: header, 12 digits, residuals survive a round trip") {
        const auto r = run_cli({"solve", "ce:2,1", "--alpha", "2", "--sigma", "0.5", "--cost", "1", "--csv"});
        REQUIRE(r.code == 0);
        const auto ls = lines(r.out);
        REQUIRE(ls.size() == 2);
        CHECK(ls[0] + "\n" == golden("solve_header.csv"));
        const auto f = fields(ls[1]);
        REQUIRE(f.size() == 11);
        CHECK(f[0] == "two_boundary");
        CHECK(f[10] == "0");
        const double a = std::stod(f[2]);
        const double b = std::stod(f[3]);
        const double slope = std::stod(f[8]);
        const double intercept = std::stod(f[9]);
        const auto p = make_cross_entropy(2, 1);
        const auto params = ProblemParams::from_K(16);
        const double scale = 1.0 + std::abs(slope);
        CHECK(std::abs(h1(p, params, a) - slope) <= 1e-8 * scale);
        CHECK(std::abs(h1(p, params, b) - slope) <= 1e-8 * scale);
        CHECK(std::abs(h(p, params, a) - slope * a - intercept) <= 1e-9 * scale);
        CHECK(std::abs(h(p, params, b) - slope * b - intercept) <= 1e-9 * scale);
    }

    TEST_CASE("usage errors exit 1") {
        CHECK(run_cli({"solve", "hinge", "--K", "16"}).code == cli::kUsage);
        CHECK(run_cli({"solve", "ce:1,1", "--K", "-1"}).code == cli::kUsage);
        CHECK(run_cli({"solve", "ce:1,1"}).code == cli::kUsage);
        CHECK(run_cli({"solve", "ce:1,1", "--K", "16", "--json", "--csv"}).code == cli::kUsage);
        CHECK(run_cli({"bogus"}).code == cli::kUsage);
        CHECK(run_cli({"--help"}).code == cli::kOk);
    }

    TEST_CASE("sweep: CSV file with manifest sidecar") {
        const auto path = scratch_dir() / "sweep.csv";
        const auto r = run_cli({"sweep", "l1", "--K-min", "6", "--K-max", "40", "--points", "6",
                                "--out", path.string()});
        REQUIRE(r.code == 0);
        const auto ls = lines(read_file(path));
        REQUIRE(ls.size() == 7);
        CHECK(ls[0] + "\n" == golden("sweep_header.csv"));
        CHECK(ls[1] == "6,,,,,,,1");
        const auto last = fields(ls[6]);
        CHECK(last[0] == "40");
        CHECK(last[7] == "0");
        CHECK(std::stod(last[5]) < 0.0);
        const auto m = nlohmann::json::parse(read_file(path.string() + ".manifest.json"));
        CHECK(m["command"] == "sweep");
        CHECK(m["penalty"] == "l1");
        CHECK(m["sweep"]["points"] == 6);
    }

    TEST_CASE("sweep: single point below threshold") {
        const auto r = run_cli({"sweep", "ce:1,1", "--K-min", "5", "--K-max", "5", "--points", "1"});
        REQUIRE(r.code == 0);
        const auto ls = lines(r.out);
        REQUIRE(ls.size() == 2);
        CHECK(ls[1] == "5,,,,,,,1");
    }

    TEST_CASE("sweep: errors") {
        CHECK(run_cli({"sweep", "l1", "--K-min", "10", "--K-max", "5", "--points", "3"}).code == cli::kUsage);
        const auto r = run_cli({"sweep", "l1", "--K-min", "10", "--K-max", "20", "--points", "3",
                                "--out", "/nonexistent-dir/x.csv"});
        CHECK(r.code == cli::kUsage);
        CHECK(r.err.find("cannot write") != std::string::npos);
    }

    TEST_CASE("simulate: seed repeat reproduces the report") {
        setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
        const std::vector<std::string> args{"simulate", "ce:1,1", "--K", "16", "--paths", "500",
                                            "--dt", "1e-3", "--seed", "9", "--perturb", "0.05"};
        const auto a = run_cli(args);
        const auto b = run_cli(args);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        const auto j = nlohmann::json::parse(a.out);
        CHECK(j["manifest"]["seed"] == 9);
        CHECK(j["manifest"]["timestamp"] == "2023-11-14T22:13:20Z");
        CHECK(j["analytic"] == false);
        CHECK(j["perturbations"].size() == 4);
        CHECK(j["optimal"]["n_paths"] == 500);
        unsetenv("SOURCE_DATE_EPOCH");
    }

    TEST_CASE("simulate: seed falls back to the environment") {
        setenv("SEQTEST_SEED", "77", 1);
        const auto r = run_cli({"simulate", "l1", "--K", "16", "--paths", "10", "--dt", "1e-3"});
        unsetenv("SEQTEST_SEED");
        REQUIRE(r.code == 0);
        CHECK(nlohmann::json::parse(r.out)["manifest"]["seed"] == 77);
    }

    TEST_CASE("simulate: degenerate regime is analytic") {
        const auto r = run_cli({"simulate", "ce:1,1", "--K", "4", "--prior", "0.3"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["analytic"] == true);
        CHECK(j["risk"].get<double>() == doctest::Approx(make_cross_entropy(1, 1).value(0.3)));
        CHECK_FALSE(j.contains("optimal"));
    }

    TEST_CASE("simulate: invalid config") {
        CHECK(run_cli({"simulate", "l1", "--K", "16", "--prior", "1.5"}).code == cli::kUsage);
        CHECK(run_cli({"simulate", "l1", "--K", "16", "--perturb", "0.7"}).code == cli::kUsage);
    }

    TEST_CASE("validate") {
        auto r = run_cli({"validate", "ce:1,1", "--K", "16"});
        CHECK(r.code == 0);
        CHECK(r.out.find("all checks passed") != std::string::npos);
        CHECK(run_cli({"validate", "l1", "--K", "16"}).code == 0);
        r = run_cli({"validate", "ce:1,1", "--K", "8"});
        CHECK(r.code == 0);
        CHECK(r.out.find("degenerate") != std::string::npos);
    }
}
