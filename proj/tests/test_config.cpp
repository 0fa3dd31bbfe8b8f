// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lptvsync/config.hpp"
#include "support.hpp"

using namespace lptvsync;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_of(const std::string& text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field() + " | " + e.what();
    }
    return "accepted";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled scenarios") {
    const ScenarioConfig s1 = testsupport::load("scenario1");
    const FrameGeometry g1 = s1.geometry();
    CHECK(g1.N == 8);
    CHECK(g1.M == 2);
    CHECK(g1.L_tot == 16);
    CHECK(g1.L_sw == 12);
    CHECK(g1.P_h == 1);
    CHECK(s1.sw().to_string() == "-1+1-1+1-1+1+1-1+1-1+1-1");
    CHECK(s1.equalizer().omega == 295);
    CHECK(s1.e_r0 == 3);
    CHECK(s1.e_r1 == 2);

    const ScenarioConfig s2 = testsupport::load("scenario2");
    CHECK(s2.geometry().P_h == 2);
    CHECK(s2.geometry().P_z == 8);
    CHECK(s2.sw().to_string() == "+1+1+1+1+1+1+1+1+1+1+1+1");
    CHECK(s2.equalizer().omega == 146);
    for (int m = 0; m < 8; ++m) {
        CHECK(s2.noise.variance_profile[m] ==
              doctest::Approx(2.0 + std::cos(2.0 * 3.14159265358979323846 * m / 8.0)));
    }

    const std::string echo = describe_derived(s1);
    CHECK(echo.find("L_sw=12") != std::string::npos);
    CHECK(echo.find("omega=295") != std::string::npos);
}

TEST_CASE("serialization round trip") {
    for (const char* name : {"scenario1", "scenario2", "white_noise"}) {
        const ScenarioConfig a = testsupport::load(name);
        const ScenarioConfig b = parse_config_text(serialize_config(a));
        CHECK(a == b);
    }
    ScenarioConfig c = testsupport::load("scenario1");
    c.omega = 4;
    c.receiver_noise = NoiseSpec{{1.0}, {1.0, 0.5}};
    c.constellation_name = "custom";
    CHECK(parse_config_text(serialize_config(c)) == c);
}

TEST_CASE("rejections name the field") {
    const std::string base = read_text(testsupport::scenario_path("scenario1"));
    // N = 3 against a memory-3 noise filter
    const std::string short_block = replace(
        replace(replace(base, "\"N\": 8", "\"N\": 3"), "\"L_z\": 2", "\"L_z\": 3"),
        "0.35985500552675725]", "0.35985500552675725, 0.1]");
    CHECK(field_of(short_block) == "geometry | geometry: N > L_ch violated");
    CHECK(field_of(replace(base, "\"-1+1-1+1-1+1+1-1+1-1+1-1\"", "\"-1+1-1\"")).rfind("sync_word", 0) == 0);
    CHECK(field_of(replace(base, "\"-1+1-1+1-1+1+1-1+1-1+1-1\"", "[0,1,0,1,0,1,1,0,1,0,1,7]")).rfind("sync_word", 0) == 0);
    CHECK(field_of(replace(base, "\"P_h\": 1", "\"P_h\": 2")).rfind("geometry.P_h", 0) == 0);
    CHECK(field_of(replace(base, "\"e_r0\": 3", "\"e_r0\": 9")).rfind("detectors.e_r0", 0) == 0);
    CHECK(field_of(replace(base, "\"L_EQ\": 300", "\"L_EQ\": 301")).rfind("equalizer.L_EQ", 0) == 0);
    CHECK(field_of(replace(base, "\"L_EQ\": 300}", "\"L_EQ\": 300, \"omega\": 296}"))
              .rfind("equalizer.omega", 0) == 0);
    CHECK(field_of(replace(base, "\"bpsk\"", "\"8psk\"")).rfind("constellation", 0) == 0);
    CHECK(field_of(replace(base, "\"variance_profile\": [1.0]", "\"variance_profile\": [-1.0]")).rfind("noise", 0) == 0);
    CHECK(field_of(replace(base, "\"roc\": 200000", "\"roc\": 0")).rfind("trials", 0) == 0);
    CHECK(field_of("{").rfind("config", 0) == 0);
    CHECK(field_of("[]").rfind("config", 0) == 0);
    CHECK_THROWS_AS(parse_config("/nonexistent/scenario.json"), ConfigError);
}
