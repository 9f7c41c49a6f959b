#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef CLIMKIT_CLI_PATH
#define CLIMKIT_CLI_PATH "climkit"
#endif
#ifndef CLIMKIT_DATA_DIR
#define CLIMKIT_DATA_DIR "data"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLIMKIT_CLI_PATH) + " --data " + CLIMKIT_DATA_DIR + " " +
                            args + " > /dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("validate on bundled calibrations exits clean") {
    auto dir = fresh_dir("cli_validate");
    CHECK(run_cli("validate --emulator 3SR --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "operator.csv"));
    CHECK(fs::exists(dir / "validate.json"));
}

TEST_CASE("unknown command exits nonzero with usage") {
    CHECK(run_cli("definitely-not-a-command") != 0);
}

TEST_CASE("missing data is a data error (exit 3)") {
    auto cfg = fs::temp_directory_path() / "cli_missing_series.json";
    std::ofstream(cfg) << R"({"scenario": {"emissions": "/nonexistent/series.csv"}})";
    auto dir = fresh_dir("cli_baddata");
    CHECK(run_cli("rcp --config " + cfg.string() + " --emulator 3SR --out " + dir.string()) == 3);
}

TEST_CASE("bad config file is a config error (exit 2)") {
    auto bad = fs::temp_directory_path() / "cli_bad.json";
    std::ofstream(bad) << "{broken";
    CHECK(run_cli("pulse --config " + bad.string()) == 2);
}

TEST_CASE("pulse outputs are deterministic byte-for-byte") {
    auto a = fresh_dir("cli_pulse_a");
    auto b = fresh_dir("cli_pulse_b");
    REQUIRE(run_cli("pulse --emulator 4PR --out " + a.string()) == 0);
    REQUIRE(run_cli("pulse --emulator 4PR --out " + b.string()) == 0);
    for (const char* f : {"fraction.csv", "masses.csv", "temperature.csv", "forcing.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("pulse fraction at year 100 stays inside the benchmark envelope") {
    auto dir = fresh_dir("cli_pulse_env");
    REQUIRE(run_cli("pulse --emulator 4PR --out " + dir.string()) == 0);

    double fraction100 = -1.0;
    std::ifstream in(dir / "fraction.csv");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (std::stoi(line.substr(0, comma)) == 100) {
            fraction100 = std::stod(line.substr(comma + 1));
        }
    }
    REQUIRE(fraction100 >= 0.0);

    // envelope at year 100 from the bundled curves
    auto mass_at = [&](const char* file) {
        std::ifstream c(fs::path(CLIMKIT_DATA_DIR) / "benchmarks/PI" / file);
        std::string row;
        std::getline(c, row);
        while (std::getline(c, row)) {
            const auto comma = row.find(',');
            if (std::stoi(row.substr(0, comma)) == 100) return std::stod(row.substr(comma + 1));
        }
        return -1.0;
    };
    const double lo = (mass_at("mu_minus.csv") - 589.0) / 100.0;
    const double hi = (mass_at("mu_plus.csv") - 589.0) / 100.0;
    CHECK(fraction100 >= lo);
    CHECK(fraction100 <= hi);
}

TEST_CASE("alpha endpoints reproduce the scaled operators through the CLI") {
    auto mid = fresh_dir("cli_val_mid");
    auto slow = fresh_dir("cli_val_slow");
    REQUIRE(run_cli("validate --emulator 4PR --alpha 0 --out " + mid.string()) == 0);
    REQUIRE(run_cli("validate --emulator 4PR --alpha 1 --out " + slow.string()) == 0);
    CHECK(slurp(mid / "operator.csv") != slurp(slow / "operator.csv"));
}

TEST_CASE("a calibration file path works as the emulator selector") {
    auto dir = fresh_dir("cli_val_path");
    CHECK(run_cli("validate --emulator " + std::string(CLIMKIT_DATA_DIR) +
                  "/calibrations/pd_4pr.json --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "validate.json"));
}

TEST_CASE("output root override via the environment") {
    auto root = fresh_dir("cli_root");
    setenv("CLIMKIT_OUT_ROOT", root.string().c_str(), 1);
    const int rc = run_cli("validate --emulator 3SR --out sub");
    unsetenv("CLIMKIT_OUT_ROOT");
    CHECK(rc == 0);
    CHECK(fs::exists(root / "sub" / "validate.json"));
}
