// End-to-end checks of the command-line tool: exit codes, output schema, and
// thread-count determinism, run against the built binary.

#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef BILAT_CLI_PATH
#define BILAT_CLI_PATH "bilat"
#endif
#ifndef BILAT_DATA_DIR
#define BILAT_DATA_DIR "data"
#endif

namespace {

std::string temp_path(const std::string& suffix) {
    static int counter = 0;
    return (std::filesystem::temp_directory_path() /
            ("bilat_cli_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + suffix))
        .string();
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string out_path = temp_path(".out");
    const std::string cmd = env_prefix + std::string(BILAT_CLI_PATH) + " " + args + " > " +
                            out_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_path);
    r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    std::remove(out_path.c_str());
    return r;
}

std::string write_temp(const std::string& contents) {
    const std::string path = temp_path(".csv");
    std::ofstream out(path);
    out << contents;
    return path;
}

const std::string kOme = std::string(BILAT_DATA_DIR) + "/ome.csv";

}  // namespace

TEST_CASE("test command reports the example analysis") {
    const auto r = run_cli("test --input " + kOme);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1.6917") != std::string::npos);
    CHECK(r.output.find("1.6392") != std::string::npos);
    CHECK(r.output.find("2.3519") != std::string::npos);
    CHECK(r.output.find("0.8174") != std::string::npos);
}

TEST_CASE("json output is schema stable") {
    const auto r = run_cli("test --input " + kOme + " --format json --method score");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["tests"].size() == 1);
    const auto& t = doc["tests"][0];
    CHECK(t.contains("method"));
    CHECK(t.contains("statistic"));
    CHECK(t.contains("df"));
    CHECK(t.contains("p_value"));
    CHECK(t["method"] == "Score");
    CHECK(t["df"] == 2);
    CHECK(doc["constrained_fit"]["boundary_strata"][0] == 2);
    // at least 6 significant digits survive the round trip
    CHECK(std::fabs(t["statistic"].get<double>() - 1.63920) < 1e-4);
}

TEST_CASE("single-stratum input exits with the degeneracy code") {
    const auto path = write_temp(
        "stratum,group,m0,m1,m2\n"
        "only,1,8,2,8\n"
        "only,2,11,2,2\n");
    const auto r = run_cli("test --input " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("df = 0") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("degenerate stratum exits with code 2 and names the stratum") {
    const auto path = write_temp(
        "stratum,group,m0,m1,m2\n"
        "a,1,8,2,8\n"
        "a,2,11,2,2\n"
        "b,1,9,0,0\n"
        "b,2,3,1,5\n");
    const auto r = run_cli("test --input " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("'b'") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("malformed input exits with the usage code") {
    const auto path = write_temp(
        "stratum,group,m0,m1,m2\n"
        "a,1,8,2,8\n"
        "a,2,11,2,2\n"
        "a,2,1,1,1\n");
    const auto r = run_cli("test --input " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("'a'") != std::string::npos);
    std::remove(path.c_str());

    CHECK(run_cli("test --input /does/not/exist.csv").exit_code == 1);
    CHECK(run_cli("bogus-subcommand").exit_code != 0);
}

TEST_CASE("simulate size emits one CSV row per method") {
    const auto r = run_cli(
        "simulate size --j 2 --m 25 --delta 1.0 --gamma-case I --pi-case a "
        "--reps 300 --seed 5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("j,m,delta_spec,gamma_case,pi_case,method,", 0) == 0);
    CHECK(r.output.find("LRT") != std::string::npos);
    CHECK(r.output.find("Score") != std::string::npos);
    CHECK(r.output.find("Wald") != std::string::npos);
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 4);
}

TEST_CASE("simulate output is byte-identical across BILAT_THREADS settings") {
    const std::string args =
        "simulate size --j 2 --m 25 --delta 0.8 --gamma-case II --pi-case b "
        "--reps 500 --seed 42";
    const auto one = run_cli(args, "BILAT_THREADS=1 ");
    const auto four = run_cli(args, "BILAT_THREADS=4 ");
    REQUIRE(one.exit_code == 0);
    REQUIRE(four.exit_code == 0);
    CHECK(one.output == four.output);
}

TEST_CASE("simulate power single cell runs") {
    const auto r = run_cli(
        "simulate power --j 2 --m 25 --delta0 0.5 --delta-a 1.4 --gamma-case I "
        "--pi-case b --reps 300 --seed 5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("0.5:1.4") != std::string::npos);
}

TEST_CASE("simulate sweep row count") {
    const auto r = run_cli("simulate sweep --configs 10 --j 2 --m 25 --reps 100 --seed 1");
    REQUIRE(r.exit_code == 0);
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 1 + 30);
}

TEST_CASE("invalid simulate flags exit with the usage code") {
    CHECK(run_cli("simulate size --j 2 --m 25 --delta 9.0 --pi-case a --reps 10").exit_code == 1);
    CHECK(run_cli("simulate size --m 25 --reps 10").exit_code == 1);
    CHECK(run_cli("simulate size --j 2 --m 25 --gamma-case V --reps 10").exit_code == 1);
}
