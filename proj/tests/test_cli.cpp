// End-to-end tests of the command-line driver, run as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() { return LIPKIN_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd =
        cli_path() + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("evolve classical with chi = 0 keeps jz constant") {
    const int rc = run(
        "evolve --level classical --chi 0 --j 4 --ic 0.6,0.0,0.0,1.2 "
        "--t-max 10 --sample-dt 0.5 --rel-tol 1e-12 --abs-tol 1e-14 "
        "--out cli_evolve_free.csv");
    REQUIRE(rc == 0);
    const auto rows = parse_csv(slurp("cli_evolve_free.csv"));
    REQUIRE(rows.size() == 22);  // header + 21 samples
    REQUIRE(rows[0].size() == 13);
    CHECK(rows[0][0] == "t");
    CHECK(rows[0][11] == "jz_over_j");
    const double jz0 = std::stod(rows[1][11]);
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::abs(std::stod(rows[i][11]) - jz0) < 1e-9);
}

TEST_CASE("identical invocations produce byte-identical datasets") {
    const std::string args =
        "evolve --level semiclassical --chi -6 --j 4 --e-fig -1.1 "
        "--t-max 20 --out cli_repeat_#.csv";
    std::string a1 = args, a2 = args;
    a1.replace(a1.find('#'), 1, "1");
    a2.replace(a2.find('#'), 1, "2");
    REQUIRE(run(a1) == 0);
    REQUIRE(run(a2) == 0);
    CHECK(slurp("cli_repeat_1.csv") == slurp("cli_repeat_2.csv"));
}

TEST_CASE("serial and parallel batch runs produce identical datasets") {
    REQUIRE(run("poincare --level semiclassical --chi -6 --j 8 --n-ic 4 "
                "--crossings 20 --out cli_par.csv") == 0);
    REQUIRE(run("poincare --level semiclassical --chi -6 --j 8 --n-ic 4 "
                "--crossings 20 --serial --out cli_ser.csv") == 0);
    CHECK(slurp("cli_par.csv") == slurp("cli_ser.csv"));
}

TEST_CASE("exact evolution emits the quantum schema with unit norm") {
    const int rc = run(
        "evolve --level exact --chi -6 --j 4 --ic 0,-0.9 --t-max 5 "
        "--out cli_exact.csv");
    REQUIRE(rc == 0);
    const auto rows = parse_csv(slurp("cli_exact.csv"));
    REQUIRE(rows.size() == 102);
    REQUIRE(rows[0].size() == 4);
    CHECK(rows[0][3] == "norm");
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::abs(std::stod(rows[i][3]) - 1.0) < 1e-10);
}

TEST_CASE("poincare section schema and crossing ordinals") {
    const int rc = run(
        "poincare --level classical --chi -6 --j 4 --e-fig -1.1 "
        "--crossings 10 --out cli_section.csv");
    REQUIRE(rc == 0);
    const auto rows = parse_csv(slurp("cli_section.csv"));
    REQUIRE(rows.size() == 11);
    CHECK(rows[0] == std::vector<std::string>{"ic_index", "crossing_index",
                                              "t", "q_a", "p_a", "status"});
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][0] == "0");
        CHECK(rows[i][1] == std::to_string(i - 1));
        CHECK(rows[i][5] == "ok");
    }
}

TEST_CASE("tunneling requires an energy target") {
    CHECK(run("tunneling --level classical --chi -6 --j 4 "
              "--out cli_nofig.csv") == 2);
    const std::string manifest = slurp("cli_nofig.csv.manifest.json");
    CHECK(manifest.find("\"status\": \"failed\"") != std::string::npos);
    CHECK(manifest.find("--e-fig") != std::string::npos);
}

TEST_CASE("tunneling dataset over a J list") {
    const int rc = run(
        "tunneling --level semiclassical --chi -6 --e-fig -1.1 "
        "--j-list 6,8 --max-transitions 20 --crossings 2000 "
        "--out cli_tunnel.csv");
    REQUIRE(rc == 0);
    const auto rows = parse_csv(slurp("cli_tunnel.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"j", "e_fig", "t_c_mean",
                                              "t_p_mean", "ratio",
                                              "n_transitions"});
    CHECK(rows[1][0] == "6");
    CHECK(rows[2][0] == "8");
    CHECK(std::stoi(rows[1][5]) >= 1);
    CHECK(std::stod(rows[1][2]) >= std::stod(rows[1][3]));
}

TEST_CASE("config file values apply with command-line precedence") {
    {
        std::ofstream cfg("cli_case.cfg");
        cfg << "# run settings\n"
            << "chi = -6\n"
            << "j = 4\n"
            << "t_max = 5\n"
            << "ic = 0.6,0.0,0.0,1.2\n";
    }
    const int rc = run(
        "evolve --level classical --chi -0.5 --config cli_case.cfg "
        "--out cli_cfg.csv");
    REQUIRE(rc == 0);
    const std::string manifest = slurp("cli_cfg.csv.manifest.json");
    // flag wins over the file for chi; file supplies the rest
    CHECK(manifest.find("\"chi\": -0.5") != std::string::npos);
    CHECK(manifest.find("\"t_max\": 5.0") != std::string::npos);
    CHECK(manifest.find("\"ic\": \"0.6,0.0,0.0,1.2\"") != std::string::npos);
}

TEST_CASE("unknown config keys are hard errors naming the key") {
    {
        std::ofstream cfg("cli_bad.cfg");
        cfg << "xi = 1\n";
    }
    const int rc = run(
        "evolve --level classical --ic 0,-0.5 --config cli_bad.cfg "
        "--out cli_badcfg.csv");
    CHECK(rc == 2);
    const std::string err = slurp("cli_stderr.txt");
    CHECK(err.find("xi") != std::string::npos);
}

TEST_CASE("invalid inputs fail fast with a manifest") {
    CHECK(run("evolve --level nonsense --ic 0,-0.5 --out cli_badlevel.csv") ==
          2);
    CHECK(slurp("cli_badlevel.csv.manifest.json")
              .find("\"status\": \"failed\"") != std::string::npos);

    CHECK(run("evolve --level classical --j 4.3 --ic 0,-0.5 "
              "--out cli_badj.csv") == 2);
    CHECK(run("evolve --level classical --out cli_noic.csv") == 2);
}

TEST_CASE("sweep and breakdown schemas") {
    REQUIRE(run("sweep --chi -0.5 --j-list 4,8 --ic 0,-0.9 --t-max 10 "
                "--out cli_sweep.csv") == 0);
    auto rows = parse_csv(slurp("cli_sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"inv_j", "delta_classical",
                                              "delta_semiclassical"});
    CHECK(std::stod(rows[1][0]) == doctest::Approx(0.25));
    CHECK(std::stod(rows[2][0]) == doctest::Approx(0.125));

    REQUIRE(run("breakdown --chi -0.5 --j-list 4,8 --ic 0,-0.9 --t-max 60 "
                "--out cli_break.csv") == 0);
    rows = parse_csv(slurp("cli_break.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"inv_j", "t_b_classical",
                                              "t_b_semiclassical"});
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][2]) >= std::stod(rows[i][1]));
}

TEST_CASE("compare emits the three-series dataset and delta metrics") {
    REQUIRE(run("compare --chi -0.5 --j 8 --ic 0,-0.9 --t-max 10 "
                "--out cli_compare.csv") == 0);
    const auto rows = parse_csv(slurp("cli_compare.csv"));
    REQUIRE(rows.size() == 202);
    CHECK(rows[0] == std::vector<std::string>{"t", "jz_exact", "jz_classical",
                                              "jz_semiclassical"});
    const std::string manifest = slurp("cli_compare.csv.manifest.json");
    CHECK(manifest.find("delta_classical") != std::string::npos);
    CHECK(manifest.find("delta_semiclassical") != std::string::npos);
}
