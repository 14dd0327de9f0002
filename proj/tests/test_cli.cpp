#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fgw/cli.hpp"

using namespace fgw;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fgw");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Compares stdout with tests/golden/cli/<name>; FGW_UPDATE_GOLDEN=1 rewrites the file.
void check_golden(const std::string& name, const std::string& actual)
{
    const std::filesystem::path path = std::filesystem::path(FGW_GOLDEN_DIR) / "cli" / name;
    if (const char* update = std::getenv("FGW_UPDATE_GOLDEN"); update && std::string(update) == "1") {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << actual;
    }
    REQUIRE_MESSAGE(std::filesystem::exists(path), "missing golden " << path);
    CHECK_MESSAGE(read_file(path) == actual, "golden mismatch for " << name);
}

struct GoldenCase {
    std::string name;
    std::vector<std::string> args;
    int code;
};

// Every subcommand and output format, at sizes that run in well under a second.
const std::vector<GoldenCase> kCases{
    {"convolve_oracle.json", {"convolve", "--k", "2", "--n", "2", "--m", "2", "--oracle"}, 0},
    {"convolve_k3.csv", {"convolve", "--k", "3", "--n", "3", "--m", "2", "--oracle", "--format", "csv"}, 0},
    {"convolve_radial.json", {"convolve", "--f", "1,1/2", "--g", "0,1,1/3", "--oracle"}, 0},
    {"convolve_plain.csv", {"convolve", "--n", "5", "--m", "7", "--format", "csv"}, 0},
    {"norms_21.json", {"norms", "--p", "2", "--s", "1", "--radial", "1,1"}, 0},
    {"norms_weak.csv", {"norms", "--p", "1.5", "--s", "inf", "--radial", "3,0,1/2", "--format", "csv"}, 0},
    {"search_spheres.json", {"search", "--radial", "0,0,1", "--family", "spheres", "--radius", "4"}, 0},
    {"search_weak.csv",
     {"search", "--radial", "1,1/3", "--estimator", "weak", "--family", "exhaustive", "--radius", "1", "--budget",
      "32", "--format", "csv"},
     0},
    {"search_greedy.json",
     {"search", "--radial", "0,1", "--family", "greedy", "--radius", "3", "--budget", "6", "--seed", "3"},
     0},
    {"verify_lemma1.csv",
     {"verify", "lemma1", "--k", "2", "--radius", "4", "--k-max", "6", "--family", "sphere-unions", "--format",
      "csv"},
     0},
    {"verify_r22.json", {"verify", "r22", "--family", "spheres", "--radius", "3", "--n-max", "4"}, 0},
    {"verify_thm1.json",
     {"verify", "thm1", "--radial", "1,1/2,1/4", "--family", "random-subsets", "--radius", "2", "--budget", "20",
      "--seed", "9"},
     0},
    {"verify_thm3.csv",
     {"verify", "thm3", "--samples", "4", "--max-degree", "3", "--seed", "5", "--family", "sphere-unions",
      "--radius", "5", "--format", "csv"},
     0},
    {"verify_thm4.csv", {"verify", "thm4", "--radial", "2,1,0,1/2", "--p", "1.25,1.5", "--format", "csv"}, 0},
    {"verify_thm5.json", {"verify", "thm5", "--s", "2", "--t", "inf", "--n-lo", "4", "--n-hi", "24"}, 0},
    // The fit is pre-asymptotic on a short range and misses the tolerance.
    {"verify_thm5_short.csv",
     {"verify", "thm5", "--s", "2", "--t", "2", "--n-lo", "4", "--n-hi", "14", "--format", "csv"},
     1},
    {"verify_pcolumn.csv", {"verify", "pcolumn", "--k-max", "4", "--radius", "5", "--format", "csv"}, 0},
    {"verify_qcolumn_small.json", {"verify", "qcolumn", "--n-max", "3", "--radius", "5"}, 0},
    {"verify_qcolumn_violation.csv", {"verify", "qcolumn", "--n-max", "4", "--radius", "6", "--format", "csv"}, 1},
    {"conjecture.csv", {"conjecture", "--radial", "1,1/3,1/9", "--s", "1,2", "--format", "csv"}, 0},
    {"conjecture_k3.json", {"conjecture", "--k", "3", "--radial", "0,0,1", "--s", "1.5"}, 0},
};

} // namespace

TEST_CASE("cli outputs match golden files")
{
    for (const auto& c : kCases) {
        CAPTURE(c.name);
        const auto r = run_cli(c.args);
        CHECK(r.code == c.code);
        check_golden(c.name, r.out);
        if (c.code == cli::kViolation)
            CHECK(r.err.find("violation: ") == 0);
        else
            CHECK(r.err.empty());
    }
}

TEST_CASE("cli examples")
{
    const auto conv = run_cli({"convolve", "--k", "2", "--n", "2", "--m", "2", "--oracle"});
    REQUIRE(conv.code == 0);
    const auto report = nlohmann::json::parse(conv.out).at(0);
    CHECK(report.at("summary").at("coefficients") == nlohmann::json({{"0", "12"}, {"2", "2"}, {"4", "1"}}));
    CHECK(report.at("summary").at("oracle_match") == true);

    CHECK(run_cli({"verify", "lemma1", "--k", "2", "--radius", "4", "--k-max", "6", "--family", "sphere-unions"})
              .code == 0);

    const auto norms = run_cli({"norms", "--p", "2", "--s", "1", "--radial", "1,1"});
    REQUIRE(norms.code == 0);
    const double value = nlohmann::json::parse(norms.out).at(0).at("summary").at("norm").get<double>();
    CHECK(value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("cli violations print the witness")
{
    const auto r = run_cli({"verify", "qcolumn", "--n-max", "4", "--radius", "6"});
    CHECK(r.code == cli::kViolation);
    CHECK(r.err.find("n=4 alpha=-0.5") != std::string::npos);
    const auto report = nlohmann::json::parse(r.out).at(0);
    CHECK(report.at("status") == "fail");
    CHECK(report.at("witness").get<std::string>().find("108 <= 81") != std::string::npos);
}

TEST_CASE("cli usage and budget errors exit 2")
{
    const std::vector<std::vector<std::string>> bad{
        {},
        {"frobnicate"},
        {"norms", "--p", "2", "--s", "1", "--radial", "1,x"},
        {"norms", "--p", "2", "--s", "one", "--radial", "1"},
        {"norms", "--p", "0.5", "--s", "1", "--radial", "1"},
        {"convolve", "--n", "2"},
        {"convolve", "--n", "2", "--m", "2", "--f", "1"},
        {"convolve", "--n", "2", "--m", "2", "--bogus"},
        {"verify", "thm9"},
        {"verify", "lemma1", "--family", "nonsense"},
        {"verify", "lemma1", "--family", "greedy"},
        {"verify", "thm5", "--s", "3", "--t", "inf"},
        {"verify", "thm5", "--s", "2", "--t", "inf", "--n-lo", "4", "--n-hi", "6"},
        {"search", "--radial", "0,1", "--family", "exhaustive", "--radius", "2", "--budget", "10"},
        {"convolve", "--n", "6", "--m", "6", "--oracle", "--sphere-cap", "100"},
        {"--k", "1", "norms", "--p", "2", "--s", "1", "--radial", "1"},
    };
    for (const auto& args : bad) {
        CAPTURE(args.size() > 0 ? args[0] : std::string("<none>"));
        const auto r = run_cli(args);
        CHECK(r.code == cli::kUsage);
        CHECK(!r.err.empty());
    }
    const auto budget = run_cli({"convolve", "--n", "6", "--m", "6", "--oracle", "--sphere-cap", "100"});
    CHECK(budget.err.find("budget exceeded") == 0);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("cli writes the report to --output")
{
    const auto path = std::filesystem::temp_directory_path() / "fgw_cli_output.csv";
    std::filesystem::remove(path);
    const auto r = run_cli({"norms", "--p", "2", "--s", "2", "--radial", "1", "--format", "csv", "--output",
                            path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(path).rfind("id,params,lhs,rhs,margin,status\n", 0) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("cli reports do not depend on the thread count")
{
    const std::vector<std::vector<std::string>> runs{
        {"verify", "lemma1", "--family", "random-subsets", "--radius", "4", "--budget", "60", "--seed", "42",
         "--k-max", "6"},
        {"verify", "thm3", "--samples", "6", "--seed", "1", "--family", "random-subsets", "--radius", "3",
         "--budget", "30"},
        {"search", "--radial", "1,1,1", "--family", "greedy", "--radius", "3", "--budget", "5"},
        {"verify", "qcolumn", "--n-max", "4", "--radius", "6"},
    };
    for (const auto& args : runs) {
        CAPTURE(args[1]);
        auto one = args;
        one.insert(one.end(), {"--threads", "1"});
        auto four = args;
        four.insert(four.end(), {"--threads", "4"});
        const auto a = run_cli(one);
        const auto b = run_cli(four);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);

        // FGW_THREADS without the flag.
        ::setenv("FGW_THREADS", "3", 1);
        const auto c = run_cli(args);
        ::unsetenv("FGW_THREADS");
        CHECK(c.out == a.out);
    }
}
