#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wavekit/commands.hpp"

using namespace wavekit;
using cli::Json;

namespace {

const std::string kProblems = WAVEKIT_PROBLEMS;
const std::string kBinary = WAVEKIT_BIN;

int run(const std::string& args) {
    const std::string cmd = kBinary + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("problem file parsing") {
    auto pf = cli::parse_problem_file(
        "name = \"demo\"\n"
        "g = \"1\"\nf = \"0\"\nD = \"1\"\nrho = \"u - u^2\"\n"
        "[params]\nK = 0.5  # trailing comment\n"
        "[options]\ntol_c = 1e-7\n");
    CHECK(pf.name == "demo");
    CHECK(pf.params.at("K") == 0.5);
    CHECK(pf.options.tol_c == 1e-7);

    CHECK_THROWS_AS((void)cli::parse_problem_file(""), ParseError);
    CHECK_THROWS_AS((void)cli::parse_problem_file("g = \"1\"\n"), ParseError);
    CHECK_THROWS_AS((void)cli::parse_problem_file("bogus = \"1\"\n"), ParseError);
    CHECK_THROWS_AS((void)cli::parse_problem_file("g = 1\n"), ParseError);
    CHECK_THROWS_AS(
        (void)cli::parse_problem_file("g = \"1\"\nf = \"0\"\nD = \"1\"\nrho = \"u\"\n"
                                      "[options]\nbogus = 3\n"),
        ParseError);
}

TEST_CASE("validate command on the shipped problems") {
    auto res = cli::cmd_validate(kProblems + "/ex1.toml");
    CHECK(res.exit_code == cli::kExitOk);
    CHECK(res.json["pass"] == true);

    // under-threshold accumulation fails the integral condition
    auto bad = cli::cmd_validate(kProblems + "/ex1.toml", {{"K", 0.1}});
    CHECK(bad.exit_code == cli::kExitHypothesisFailure);
    CHECK(bad.json["pass"] == false);
    bool g1_fail = false;
    for (const auto& c : bad.json["checks"])
        if (c["id"].get<std::string>().rfind("ip_g1", 0) == 0 && c["pass"] == false)
            g1_fail = true;
    CHECK(g1_fail);
}

TEST_CASE("threshold command emits the bracket") {
    auto res = cli::cmd_threshold(kProblems + "/ex3.toml");
    REQUIRE(res.exit_code == cli::kExitOk);
    CHECK(res.json["bracket"]["lower"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.json["bracket"]["upper"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::fabs(res.json["c_hat"].get<double>() - 2.0) <= 1e-3);

    auto kpp = cli::cmd_threshold(kProblems + "/kpp.toml");
    REQUIRE(kpp.exit_code == cli::kExitOk);
    CHECK(std::fabs(kpp.json["c_hat"].get<double>() - 2.0) <= 1e-4);
}

TEST_CASE("wave command round-trips its JSON bit-for-bit") {
    auto res = cli::cmd_wave(kProblems + "/kpp.toml", 3.0, std::nullopt, "/tmp/wavekit_kpp");
    REQUIRE(res.exit_code == cli::kExitOk);
    CHECK(res.json["exists"] == "yes");
    CHECK(res.json["classification"] == "classical");

    const std::string once = res.json.dump();
    const std::string twice = Json::parse(once).dump();
    CHECK(once == twice);

    // CSV exists, has the header, u strictly decreasing
    std::ifstream csv(res.json["csv"].get<std::string>());
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,u,z,phi");
    auto pf = cli::load_problem_file(kProblems + "/kpp.toml");
    auto problem = cli::build_problem(pf);
    double prev_u = 2.0;
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string t, u, z, phi;
        std::getline(ls, t, ',');
        std::getline(ls, u, ',');
        std::getline(ls, z, ',');
        std::getline(ls, phi, ',');
        const double uv = std::stod(u);
        CHECK(uv < prev_u);
        prev_u = uv;
        // the emitted columns satisfy z = D(u) * phi
        CHECK(std::stod(z) ==
              doctest::Approx(problem.D(uv) * std::stod(phi)).epsilon(1e-9).scale(1.0));
        ++rows;
    }
    CHECK(rows > 100);

    std::ifstream svg(res.json["svg"].get<std::string>());
    REQUIRE(svg.good());
    std::string first;
    std::getline(svg, first);
    CHECK(first.find("<svg") != std::string::npos);
}

TEST_CASE("sweep flip lands inside the analytic bracket") {
    // bracket of the sqrt-diffusion example at K = 1: [sqrt(3), 16 sqrt(3)/13]
    auto res = cli::cmd_sweep(kProblems + "/ex1.toml", 1.5, 2.5, 11, "/tmp/wavekit_ex1");
    REQUIRE(res.exit_code == cli::kExitOk);
    std::ifstream csv(res.json["csv"].get<std::string>());
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);
    double flip_c = 0.0;
    bool seen_no = false;
    while (std::getline(csv, line)) {
        const std::string exists = line.substr(line.find_last_of(',') + 1);
        const double c = std::stod(line.substr(0, line.find(',')));
        if (exists != "yes") seen_no = true;
        if (exists == "yes" && flip_c == 0.0) flip_c = c;
    }
    CHECK(seen_no);
    REQUIRE(flip_c > 0.0);
    const double lower = std::sqrt(3.0), upper = 16.0 * std::sqrt(3.0) / 13.0;
    CHECK(flip_c >= lower - 1e-9);
    CHECK(flip_c <= upper + 0.1 + 1e-9);  // one sweep step of slack past the bound
}

TEST_CASE("sweep command flips existence across the threshold") {
    auto res = cli::cmd_sweep(kProblems + "/kpp.toml", 1.0, 3.0, 9, "/tmp/wavekit_kpp");
    REQUIRE(res.exit_code == cli::kExitOk);

    std::ifstream csv(res.json["csv"].get<std::string>());
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);
    CHECK(line == "c,feasible_k1,exists");
    bool was_no = false, became_yes = false;
    double flip_c = 0.0;
    while (std::getline(csv, line)) {
        const auto last = line.find_last_of(',');
        const std::string exists = line.substr(last + 1);
        const double c = std::stod(line.substr(0, line.find(',')));
        if (exists == "no" && !became_yes) was_no = true;
        if (exists == "yes" && was_no && !became_yes) {
            became_yes = true;
            flip_c = c;
        }
    }
    CHECK(was_no);
    CHECK(became_yes);
    CHECK(flip_c > 1.75);
    CHECK(flip_c <= 2.0 + 1e-9);
}

TEST_CASE("binary exit codes") {
    CHECK(run("validate " + kProblems + "/ex1.toml") == 0);
    CHECK(run("validate " + kProblems + "/ex1.toml --param K=0.1") == 2);
    CHECK(run("sweep " + kProblems + "/kpp.toml --from 3 --to 1 --steps 4") == 4);
    CHECK(run("bogus-subcommand") == 4);
    CHECK(run("validate /nonexistent.toml") == 3);

    // WAVEKIT_THREADS caps the sweep pool
    const int status = std::system(("WAVEKIT_THREADS=1 " + kBinary + " sweep " + kProblems +
                                    "/kpp.toml --from 1.8 --to 2.4 --steps 3 --out /tmp/wavekit_t1 " +
                                    "> /tmp/wavekit_t1.json 2>&1")
                                       .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    std::ifstream tj("/tmp/wavekit_t1.json");
    std::stringstream buf;
    buf << tj.rdbuf();
    CHECK(buf.str().find("\"threads\": 1") != std::string::npos);

    // malformed expression in the file
    const std::string bad = "/tmp/wavekit_bad.toml";
    std::ofstream out(bad);
    out << "g = \"1 +\"\nf = \"0\"\nD = \"1\"\nrho = \"u - u^2\"\n";
    out.close();
    CHECK(run("validate " + bad) == 3);
}
