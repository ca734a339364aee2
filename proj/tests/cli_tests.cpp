// End-to-end tests of the command-line tool: run the built binary as a
// subprocess and check exit codes, file outputs, and determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
};

std::string sandbox() {
    static std::string dir = [] {
        std::string d = "/tmp/vol32_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_shell(const std::string& cmd) {
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

RunResult run_cli(const std::string& args) {
    return run_shell("cd " + sandbox() + " && " VOL32_CLI_PATH " " + args +
                     " 2>&1");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::string kFx = VOL32_FIXTURE_DIR;
const std::regex kHex64("^[0-9a-f]{64}$");

}  // namespace

TEST_CASE("version flag and argument validation") {
    CHECK(run_cli("--version").code == 0);
    CHECK(run_cli("--version").out.find("1.0.0") != std::string::npos);

    CHECK(run_cli("definitely-not-a-command").code == 2);
    CHECK(run_cli("price").code == 2);  // missing required options

    const RunResult no_strikes = run_cli(
        "price equity --params " + kFx +
        "/params_32j_equity.txt --maturity 0.25");
    CHECK(no_strikes.code == 2);
    CHECK(no_strikes.out.find("--strikes") != std::string::npos);

    CHECK(run_cli("price equity --params /nonexistent.txt --maturity 0.25 "
                  "--strikes 100")
              .code == 2);
    CHECK(run_cli("price equity --params " + kFx +
                  "/params_32j_equity.txt --maturity 0.25 --strikes 100 "
                  "--model banana")
              .code == 2);
    CHECK(run_cli("price equity --params " + kFx +
                  "/params_32j_equity.txt --maturity -1 --strikes 100")
              .code == 2);
    CHECK(run_cli("validate --suite bogus").code == 2);
    CHECK(run_cli("calibrate --quotes " + kFx +
                  "/quotes_synthetic_9d.csv --init " + kFx +
                  "/params_32j_equity.txt --jumps banana")
              .code == 2);
    // the square-root baseline prices VIX products only
    CHECK(run_cli("price equity --params " + kFx +
                  "/params_heston_vix.txt --maturity 0.25 --strikes 1 "
                  "--model svj")
              .code == 2);
}

TEST_CASE("variance swap to stdout: deterministic, manifest written") {
    const std::string args = "price varswap --params " + kFx +
                             "/params_32j_equity.txt --maturity 0.25";
    const RunResult a = run_cli(args);
    CHECK(a.code == 0);
    const auto rows = parse_csv(a.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"strike", "price",
                                              "implied_vol"});
    REQUIRE(rows[1].size() == 3);
    const double kvar = std::stod(rows[1][0]);
    CHECK(kvar > 0.0);
    CHECK(std::stod(rows[1][1]) == 0.0);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(std::sqrt(kvar)));

    const std::string mpath = sandbox() + "/run.manifest.json";
    REQUIRE(fs::exists(mpath));
    const std::string mbytes = read_file(mpath);
    const json m = json::parse(mbytes);
    CHECK(m.at("tool_version") == "1.0.0");
    CHECK(std::string(m.at("command")).rfind("price varswap", 0) == 0);
    REQUIRE(m.at("inputs").size() == 1);
    CHECK(std::regex_match(std::string(m.at("inputs")[0].at("sha256")),
                           kHex64));

    // bitwise repeatability of both the table and the manifest
    const RunResult b = run_cli(args);
    CHECK(b.out == a.out);
    CHECK(read_file(mpath) == mbytes);
}

TEST_CASE("equity prices to a file survive a text round trip") {
    const std::string out = sandbox() + "/eq.csv";
    const RunResult r = run_cli(
        "price equity --params " + kFx +
        "/params_32j_equity.txt --maturity 0.024657534246575342 "
        "--strikes 1233,1370,1507 --out " + out);
    CHECK(r.code == 0);
    REQUIRE(fs::exists(out));
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 3);
        for (const std::string& cell : rows[i]) {
            // %.17g prints enough digits that parsing is lossless
            const double v = std::stod(cell);
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            CHECK(cell == buf);
        }
        CHECK(std::stod(rows[i][1]) > 0.0);   // price
        CHECK(std::stod(rows[i][2]) > 0.0);   // implied vol
    }
    // deep in-the-money is worth more
    CHECK(std::stod(rows[1][1]) > std::stod(rows[3][1]));

    const json m = json::parse(read_file(out + ".manifest.json"));
    REQUIRE(m.at("outputs").size() == 1);
    CHECK(m.at("outputs")[0].at("path") == out);
    const std::string sha = m.at("outputs")[0].at("sha256");
    CHECK(std::regex_match(sha, kHex64));
    if (std::system("command -v sha256sum > /dev/null 2>&1") == 0) {
        const RunResult h = run_shell("sha256sum " + out);
        CHECK(h.out.rfind(sha, 0) == 0);
    }
}

TEST_CASE("vix auto strike grid") {
    const std::string out = sandbox() + "/vix.csv";
    const RunResult r = run_cli("price vix --params " + kFx +
                                "/params_32_vix.txt --maturity 0.25 "
                                "--strikes auto --out " + out);
    CHECK(r.code == 0);
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 12);  // header + 11 strikes
    for (std::size_t i = 2; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][0]) > std::stod(rows[i - 1][0]));
        CHECK(std::stod(rows[i][1]) < std::stod(rows[i - 1][1]));  // calls
        CHECK(std::stod(rows[i][2]) > 0.0);
    }
}

TEST_CASE("martingale gate: refusal and research override") {
    const std::string bad = sandbox() + "/bad_params.txt";
    std::ofstream(bad) << "kappa = 0.2\ntheta = 0.04\nepsilon = 1.0\n"
                          "rho = 0.9\nv0 = 0.04\nr = 0.0\ns0 = 100\n";
    const std::string base = "price equity --params " + bad +
                             " --maturity 0.25 --strikes 90,100,110";
    const RunResult refused = run_cli(base);
    CHECK(refused.code == 2);
    CHECK(refused.out.find("martingale") != std::string::npos);
    CHECK(run_cli(base + " --allow-strict-local --out " + sandbox() +
                  "/strict.csv")
              .code == 0);
}

TEST_CASE("figure reproduction: shape diagnostics and artifacts") {
    const std::string d1 = sandbox() + "/fig1";
    fs::create_directories(d1);
    const RunResult f1 =
        run_cli("reproduce-figure 1 --out-dir " + d1);
    CHECK(f1.code == 0);
    for (const char* ext : {".csv", ".svg", "_diagnostics.txt",
                            ".manifest.json"})
        CHECK(fs::exists(d1 + "/figure1" + ext));
    const std::string diag1 = read_file(d1 + "/figure1_diagnostics.txt");
    CHECK(diag1.find("expected positive: yes") != std::string::npos);
    CHECK(diag1.find("strictly increasing: yes") != std::string::npos);
    CHECK(diag1.find("NO") == std::string::npos);

    const std::string d2 = sandbox() + "/fig2";
    fs::create_directories(d2);
    const RunResult f2 =
        run_cli("reproduce-figure 2 --out-dir " + d2);
    CHECK(f2.code == 0);
    const std::string diag2 = read_file(d2 + "/figure2_diagnostics.txt");
    CHECK(diag2.find("expected negative: yes") != std::string::npos);
    CHECK(diag2.find("strictly decreasing: yes") != std::string::npos);

    const std::string d4 = sandbox() + "/fig4";
    fs::create_directories(d4);
    const RunResult f4 =
        run_cli("reproduce-figure 4 --out-dir " + d4);
    CHECK(f4.code == 0);
    const std::string diag4 = read_file(d4 + "/figure4_diagnostics.txt");
    CHECK(diag4.find("interior: yes") != std::string::npos);
    const std::string csv4 = read_file(d4 + "/figure4.csv");
    CHECK(csv4.find(",model") != std::string::npos);
    CHECK(csv4.find(",quote") != std::string::npos);

    CHECK(run_cli("reproduce-figure 9").code == 2);
}

TEST_CASE("validation suite: exit codes, determinism, thread invariance") {
    const std::string rep = sandbox() + "/report.txt";
    const RunResult a = run_cli(
        "validate --suite transforms --paths 2000 --seed 7 --out " + rep);
    CHECK(a.code == 0);
    const std::string text = read_file(rep);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find(", 0 failed,") != std::string::npos);
    CHECK(fs::exists(rep + ".manifest.json"));

    const RunResult b = run_cli(
        "validate --suite transforms --paths 2000 --seed 7 --out " + rep);
    CHECK(b.code == 0);
    CHECK(b.out == a.out);

    // starved of paths, statistical checks declare themselves inconclusive
    // rather than passing or failing
    const RunResult starved =
        run_cli("validate --suite vix --paths 100 --seed 7");
    CHECK(starved.code == 0);
    CHECK(starved.out.find("INCONCLUSIVE") != std::string::npos);
    CHECK(starved.out.find(", 0 failed,") != std::string::npos);

    // the worker count must not leak into results
    const std::string r1 = sandbox() + "/rep_t1.txt";
    const std::string r2 = sandbox() + "/rep_t2.txt";
    CHECK(run_cli("--threads 1 validate --suite transforms --paths 600 "
                  "--seed 3 --out " + r1)
              .code == 0);
    CHECK(run_cli("--threads 2 validate --suite transforms --paths 600 "
                  "--seed 3 --out " + r2)
              .code == 0);
    CHECK(read_file(r1) == read_file(r2));
}

TEST_CASE("calibration: convergence exit and artifacts") {
    const std::string out = sandbox() + "/calib";
    const RunResult ok = run_cli(
        "calibrate --quotes " + kFx + "/quotes_synthetic_9d.csv --init " +
        kFx + "/params_32j_equity.txt --method lm --out " + out);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("converged") != std::string::npos);
    REQUIRE(fs::exists(out + "_params.txt"));
    REQUIRE(fs::exists(out + "_residuals.csv"));
    const std::string params = read_file(out + "_params.txt");
    CHECK(params.find("converged") != std::string::npos);
    CHECK(params.find("NOT converged") == std::string::npos);
    const auto resid = parse_csv(read_file(out + "_residuals.csv"));
    CHECK(resid.size() == 21);  // header + 20 quotes
    const json m = json::parse(read_file(out + ".manifest.json"));
    CHECK(m.at("inputs").size() == 2);
    CHECK(m.at("outputs").size() == 2);

    // an iteration-starved run exits 4 but still writes its best point
    const std::string st = sandbox() + "/calstarve";
    const RunResult starved = run_cli(
        "calibrate --quotes " + kFx + "/quotes_synthetic_9d.csv --init " +
        kFx + "/params_32j_equity.txt --method nm --max-iter 2 --out " + st);
    CHECK(starved.code == 4);
    CHECK(fs::exists(st + "_params.txt"));
    CHECK(read_file(st + "_params.txt").find("NOT converged") !=
          std::string::npos);
}
