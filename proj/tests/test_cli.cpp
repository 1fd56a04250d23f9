#include "doctest.h"

#include <string>
#include <vector>

#include "cli_checks.hpp"

using namespace clicheck;

namespace {

std::vector<Case> cases() { return golden_cases(CHOW_GOLDEN_DIR, CHOW_DATA_DIR); }

} // namespace

TEST_CASE("golden text output is byte-stable") {
    for (const auto& c : cases()) {
        CAPTURE(c.name);
        Run r = run(c.args);
        CHECK(r.code == c.exit_code);
        CHECK(r.out == c.expected);
        CHECK(r.err.empty());
        // Repeated runs give identical bytes.
        CHECK(run(c.args).out == r.out);
    }
}

TEST_CASE("machine and text output agree") {
    for (const auto& c : cases()) {
        CAPTURE(c.name);
        for (const auto& what : differential(c)) FAIL_CHECK(what);
    }
}

TEST_CASE("agreement check notices mismatched output") {
    json j = json::parse(run({"chow", "--disc", "-23", "--json"}).out);
    CHECK_FALSE(disagreements(run({"chow", "--disc", "-7"}).out, j).empty());
    CHECK(disagreements(run({"chow", "--disc", "-23"}).out, j).empty());
}

TEST_CASE("worked invocations") {
    CHECK(has_line(run({"chow", "--disc", "-7", "--conductor", "2"}).out, "Chow: trivial"));
    CHECK(has_line(run({"chow", "--data", std::string(CHOW_DATA_DIR) + "/biquadratic_-3_13.json", "--order", "main"}).out,
                   "Chow: Z/4 (non-split over Z/2 by Z/2)"));
    CHECK(has_line(run({"principal", "--disc", "-7", "--conductor", "2", "--divisor", "2.0:1"}).out,
                   "Result: principal, generated by (1+sqrt(-7))/2"));
    CHECK(has_line(run({"principal", "--disc", "-7", "--conductor", "2", "--divisor", ""}).out,
                   "Result: principal, generated by 1"));
    Run gauss = run({"principal", "--disc", "-4", "--conductor", "3", "--divisor", "3.0:1"});
    CHECK(gauss.code == chow::exit_negative);
    CHECK(has_line(gauss.out, "Result: not principal (step 1)"));
    Run info = run({"order-info", "--disc", "-7", "--conductor", "2"});
    CHECK(info.out.find("d=(1,1), e=(1,1), g=1") != std::string::npos);
    CHECK(has_prefix_line(info.out, "Pic: 1 "));
    CHECK(info.out.find("all hold") != std::string::npos);
    CHECK(run({"order-info", "--disc", "-7"}).out.find("maximal order") != std::string::npos);
    Run ft = run({"find-trivial", "--disc", "-7"});
    CHECK(ft.code == chow::exit_ok);
    CHECK(has_line(ft.out, "Conductor: 1"));
}

TEST_CASE("exit codes") {
    const std::string data = CHOW_DATA_DIR;
    SUBCASE("0: success") {
        CHECK(run({"chow", "--disc", "-7"}).code == chow::exit_ok);
        CHECK(run({"--help"}).code == chow::exit_ok);
    }
    SUBCASE("1: negative answer") {
        CHECK(run({"conductor-test", "--disc", "-7", "--ideal", "2.0:1"}).code == chow::exit_negative);
        CHECK(run({"principal", "--disc", "-4", "--conductor", "3", "--divisor", "3.0:1"}).code ==
              chow::exit_negative);
        CHECK(run({"find-trivial", "--disc", "-84", "--prime-budget", "50"}).code == chow::exit_negative);
    }
    SUBCASE("2: usage and invalid input") {
        CHECK(run({}).code == chow::exit_usage);
        CHECK(run({"chow"}).code == chow::exit_usage);
        CHECK(run({"chow", "--disc", "20"}).code == chow::exit_usage);
        CHECK(run({"chow", "--disc", "-7", "--data", data + "/quintic_7.json"}).code == chow::exit_usage);
        CHECK(run({"chow", "--disc", "-7", "--conductor", "0"}).code == chow::exit_usage);
        CHECK(run({"principal", "--disc", "-7", "--divisor", "2.0:x"}).code == chow::exit_usage);
        CHECK(run({"principal", "--disc", "-7", "--divisor", "5.1:1"}).code == chow::exit_usage);
        CHECK(run({"principal", "--disc", "-7", "--divisor", "4:1"}).code == chow::exit_usage);
        CHECK(run({"frobnicate"}).code == chow::exit_usage);
        CHECK(run({"conductor-test", "--disc", "-7"}).code == chow::exit_usage);
    }
    SUBCASE("3: declared-data errors") {
        Run r = run({"chow", "--data", data + "/sextic_7_template.json", "--order", "0"});
        CHECK(r.code == chow::exit_data);
        CHECK_FALSE(r.err.empty());
        CHECK(run({"chow", "--data", data + "/no_such_file.json"}).code == chow::exit_data);
    }
    SUBCASE("4: bound exceeded") {
        CHECK(run({"principal", "--disc", "229", "--divisor", "3.0:3", "--bound", "2"}).code == chow::exit_bound);
        CHECK(run({"principal", "--disc", "229", "--divisor", "3.0:3"}).code == chow::exit_ok);
        CHECK(run({"chow", "--disc", "-1000003"}).code == chow::exit_bound);
    }
}
