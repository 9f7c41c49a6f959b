#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "climkit/config.hpp"
#include "test_util.hpp"

using namespace climkit;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("field lookup reports dotted paths") {
    Json doc = Json::parse(R"({"a": {"b": {"c": 3.5}}, "s": "x"})");
    CHECK(require_number(doc, "a.b.c") == 3.5);
    CHECK(require_string(doc, "s") == "x");
    CHECK_THROWS_WITH_AS(require_number(doc, "a.b.missing"),
                         "missing config field: a.b.missing", ConfigError);
    CHECK_THROWS_AS(require_number(doc, "s"), ConfigError);
    CHECK(field_or<double>(doc, "nope", 7.0) == 7.0);
}

TEST_CASE("bundled calibrations load and build admissible emulators") {
    for (const char* name : {"calibrations/pi_3sr.json", "calibrations/pi_4pr.json",
                             "calibrations/pi_4pr_x.json", "calibrations/pd_3sr.json",
                             "calibrations/pd_4pr.json"}) {
        CalibrationDoc doc = load_calibration(testutil::data_path(name));
        Emulator emu = doc.make_emulator();
        CHECK(validate_operator(emu.op).all_passed());
        if (doc.c_plus) CHECK(*doc.c_plus < 1.0);
        if (doc.c_minus) CHECK(*doc.c_minus > 1.0);
    }
    CalibrationDoc x = load_calibration(testutil::data_path("calibrations/pi_4pr_x.json"));
    REQUIRE(x.land_rule.has_value());
    CHECK(x.land_rule->land_reservoir_index == 3);
    CHECK(x.land_rule->r == 1.0);
}

TEST_CASE("calibration documents round-trip") {
    CalibrationDoc doc = load_calibration(testutil::data_path("calibrations/pi_4pr.json"));
    auto path = std::filesystem::temp_directory_path() / "climkit_cal_roundtrip.json";
    save_calibration(path.string(), doc);
    CalibrationDoc back = load_calibration(path.string());
    CHECK(back.params.rates == doc.params.rates);
    CHECK(back.params.m_eq.isApprox(doc.params.m_eq, 0.0));
    CHECK(back.topology.names == doc.topology.names);
    CHECK(*back.c_plus == *doc.c_plus);
}

TEST_CASE("alpha-weighted emulator construction from documents") {
    CalibrationDoc doc = load_calibration(testutil::data_path("calibrations/pi_4pr.json"));
    Emulator mu = doc.make_emulator(0.0);
    Emulator fast = doc.make_emulator(-1.0);
    Emulator slow = doc.make_emulator(1.0);
    // alpha = 1 scales every rate by c_plus
    CHECK(slow.op.params().rates[0] ==
          doctest::Approx(*doc.c_plus * mu.op.params().rates[0]).epsilon(1e-12));
    CHECK(fast.op.params().rates[0] ==
          doctest::Approx(*doc.c_minus * mu.op.params().rates[0]).epsilon(1e-12));

    CalibrationDoc no_extremes = doc;
    no_extremes.c_plus.reset();
    CHECK_THROWS_AS(no_extremes.make_emulator(0.5), ConfigError);
}

TEST_CASE("malformed calibration documents are rejected with config errors") {
    SUBCASE("missing background") {
        auto p = write_temp("cal_bad1.json", R"({"rates": [0.1], "m_eq": [1, 2]})");
        CHECK_THROWS_AS(load_calibration(p), ConfigError);
    }
    SUBCASE("unknown reservoir kind") {
        auto p = write_temp("cal_bad2.json", R"({
            "background": "PI",
            "topology": {"reservoirs": [{"name": "A", "kind": "plasma"}], "transfers": [[2,1]]},
            "rates": [0.1], "m_eq": [1]})");
        CHECK_THROWS_AS(load_calibration(p), ConfigError);
    }
    SUBCASE("parse error names the file") {
        auto p = write_temp("cal_bad3.json", "{nope");
        CHECK_THROWS_AS(load_calibration(p), ConfigError);
    }
}
