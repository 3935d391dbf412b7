#include <stdexcept>

#include "cbn/diagram.hpp"
#include "cbn/verify.hpp"
#include "doctest.h"

using namespace cbn;

TEST_CASE("suites run on restricted instances") {
    VerifyOptions o;
    o.census = "trefoil+";
    o.colours = std::vector<int>{2};
    SuiteReport r = run_suite("lem3.1", o);
    REQUIRE(r.results.size() == 1);
    CHECK(r.passed());
    CHECK(r.results[0].detail == "4 canonical classes checked");

    o.census = "kink-1";
    o.colours = std::vector<int>{3};
    CHECK(run_suite("thm5.2", o).passed());
    CHECK(run_suite("model-chain", o).passed());
}

TEST_CASE("instances beyond the guard are reported, not hidden") {
    VerifyOptions o;
    o.census = "figure8";
    o.max_colour = 3;
    SuiteReport r = run_suite("thm2.1", o);
    CHECK(r.count(Outcome::Skipped) == 1);
    CHECK(r.count(Outcome::Pass) == 2);
    CHECK(r.passed());
    CHECK(r.str().find("figure8 [3]: skipped (guard)") != std::string::npos);

    o.colours = std::vector<int>{3};
    SuiteReport only = run_suite("thm2.1", o);
    CHECK(!only.passed());
    CHECK(only.count(Outcome::Fail) == 0);
}

TEST_CASE("bad input") {
    CHECK_THROWS_AS(run_suite("thm9.9"), std::invalid_argument);
    VerifyOptions o;
    o.census = "nope";
    CHECK_THROWS_AS(run_suite("thm3.7", o), DiagramError);
    o.census = "hopf+";
    CHECK_THROWS_AS(run_suite("thm3.7", o), std::invalid_argument);
    o.colours = std::vector<int>{2};
    CHECK_THROWS_AS(run_suite("thm4.4", o), std::invalid_argument);
}

TEST_CASE("every listed suite runs") {
    VerifyOptions o;
    o.max_colour = 2;
    for (const std::string& s : suite_names()) {
        INFO(s);
        SuiteReport r = run_suite(s, o);
        CHECK(r.passed());
        CHECK(r.count(Outcome::Fail) == 0);
    }
}
