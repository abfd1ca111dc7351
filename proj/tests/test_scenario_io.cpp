#include "ptcsim/scenario_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <string>

using namespace ptcsim;

namespace {

std::string bundled_path(const std::string& label) {
    return std::string(PTCSIM_SCENARIO_DIR) + "/" + label + ".scn";
}

int parse_error_line(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("bundled files equal their constructors") {
    CHECK(parse_scenario(bundled_path("stable")) == scenario_stable());
    CHECK(parse_scenario(bundled_path("qss_difficulty")) == scenario_qss_difficulty());
    CHECK(parse_scenario(bundled_path("unstable")) == scenario_unstable());
}

TEST_CASE("write then parse is the identity") {
    for (const Scenario& sc : {scenario_stable(), scenario_qss_difficulty(), scenario_unstable()}) {
        CHECK(parse_scenario_text(write_scenario(sc)) == sc);
        CHECK(write_scenario(parse_scenario_text(write_scenario(sc))) == write_scenario(sc));
    }
    Scenario odd = scenario_stable();
    odd.network.lines[0].x = 0.1 + 0.2;  // not exactly representable in short decimal
    odd.plan.h = 1.0 / 3.0;
    CHECK(parse_scenario_text(write_scenario(odd)) == odd);
}

TEST_CASE("non-positive tap step is a validation error") {
    std::string text = write_scenario(scenario_stable());
    const auto at = text.find("step=0.0125");
    REQUIRE(at != std::string::npos);
    text.replace(at, 11, "step=-0.01");
    try {
        parse_scenario_text(text);
        FAIL("accepted a negative tap step");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("tap step > 0") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_scenario_text(""), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("# only a comment\n\n"), ParseError);
    CHECK(parse_error_line("[buses]\nB1 kind=slack colour=red\n") == 2);
    CHECK(parse_error_line("[buses]\n\nB1 kind=slack v=abc\n") == 3);
    CHECK(parse_error_line("[buses]\nB1 kind=swing\n") == 2);
    CHECK(parse_error_line("[plan]\nt0 = 5\nt0 = 6\n") == 3);
    CHECK(parse_error_line("[planets]\n") == 1);
    CHECK(parse_error_line("B1 kind=slack\n") == 1);
    CHECK(parse_error_line("[lines]\nL1 to=B2 x=0.1\n") == 2);
    CHECK(parse_error_line("[plan]\nmax_iters = 2.5\n") == 2);
    CHECK(parse_error_line("[buses]\nB1 kind=slack\n[buses]\n") == 3);
    CHECK_THROWS_AS(parse_scenario("/nonexistent/file.scn"), ParseError);
}

TEST_CASE("comments, blank lines and omitted defaults") {
    const std::string text = R"(
# two buses
[scenario]
label = tiny   # trailing comment

[buses]
B1 kind=slack v=1.0
B2 kind=pq

[lines]
L1 from=B1 to=B2 x=0.2

[loads]
LD1 bus=B2 kind=static p0=0.3 q0=0.1
)";
    const Scenario sc = parse_scenario_text(text);
    CHECK(sc.label == "tiny");
    REQUIRE(sc.network.buses.size() == 2);
    CHECK(sc.network.buses[1].kind == BusKind::PQ);
    CHECK(sc.network.lines[0].in_service);
    CHECK(sc.network.lines[0].r == 0.0);
    CHECK(sc.plan == ScenarioPlan{});
    CHECK(sc.fault.line.empty());
}
