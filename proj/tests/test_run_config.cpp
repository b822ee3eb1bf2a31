#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lzs/errors.hpp"
#include "lzs/run_config.hpp"

using namespace lzs;
using nlohmann::json;

// Parameter values of the reference experiments. If one of these changes,
// the presets no longer reproduce the figures they are named after.
TEST_CASE("preset fig1b") {
    const auto c = make_preset("fig1b");
    CHECK(c.preset == "fig1b");
    CHECK(c.spectrum.dim() == 2);
    CHECK(c.spectrum.left_slope() == 2.0);
    CHECK(c.spectrum.anticrossings()[0].gap == 2.0);
    CHECK(c.spectrum.anticrossings()[0].location == 0.0);
    CHECK(c.grid.phi_i == -5.0);
    CHECK(c.grid.phi_f.min == -2.0);
    CHECK(c.grid.phi_f.max == 10.0);
    CHECK(c.grid.phi_f.count == 240);
    CHECK(c.grid.tau.min == 0.01);
    CHECK(c.grid.tau.max == 4.0);
    CHECK(c.grid.tau.count == 400);
}

TEST_CASE("three-level presets") {
    struct Expect {
        const char* name;
        double g12, g13;
    };
    for (const auto& e : {Expect{"fig4a", 1.0, 10.0}, Expect{"fig4b", 2.0, 8.0}, Expect{"fig4c", 8.0, 2.0}}) {
        CAPTURE(e.name);
        const auto c = make_preset(e.name);
        REQUIRE(c.spectrum.dim() == 3);
        const auto& a = c.spectrum.anticrossings();
        CHECK(c.spectrum.left_slope() == 2.0);
        CHECK(a[0].location == 0.0);
        CHECK(a[1].location == 8.0);
        CHECK(a[0].gap == e.g12);
        CHECK(a[1].gap == e.g13);
        CHECK(a[0].branch_slope == 2.0);
        CHECK(a[1].branch_slope == 2.0);
        CHECK(c.grid.phi_i == -5.0);
        CHECK(c.grid.phi_f.min == -2.0);
        CHECK(c.grid.phi_f.max == 16.0);
        CHECK(c.grid.phi_f.count == 181);
        CHECK(c.grid.tau.min == 0.01);
        CHECK(c.grid.tau.max == 4.0);
        CHECK(c.grid.tau.count == 400);
    }
    CHECK(preset_names().size() == 4);
    CHECK_THROWS_AS(make_preset("fig9"), ValidationError);
}

TEST_CASE("config overrides a preset") {
    const json doc = json::parse(R"({
        "preset": "fig1b",
        "grid": {"phi_f": {"count": 12}},
        "stepper": {"rel_tol": 1e-7, "method": "fixed-rk4"},
        "outputs": {"name": "small", "pgm": true}
    })");
    const auto c = parse_config(doc);
    CHECK(c.grid.phi_f.count == 12);
    CHECK(c.grid.phi_f.max == 10.0);
    CHECK(c.stepper.rel_tol == 1e-7);
    CHECK(c.stepper.method == StepMethod::FixedRk4);
    CHECK(c.outputs.name == "small");
    CHECK(c.outputs.pgm);
    CHECK(c.spectrum.anticrossings()[0].gap == 2.0);
}

TEST_CASE("config rejects bad input") {
    CHECK_THROWS_AS(parse_config(json::parse(R"({"grids": {}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"grid": {"phi_f": {"count": 0}}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"grid": {"phi_f": {"count": "x"}}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"stepper": {"method": "euler"}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"stepper": {"rel_tol": -1}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"spectrum": {"left_slope": 2}})")), ValidationError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"preset": "nope"})")), ValidationError);
}

TEST_CASE("config file with comments, and json round trip") {
    const char* path = "test_run_config_tmp.json";
    {
        std::ofstream f(path);
        f << "// three-level run\n{\"preset\": \"fig4b\", /* small */ \"grid\": {\"tau\": {\"count\": 10}}}\n";
    }
    const auto c = load_config_file(path);
    std::remove(path);
    CHECK(c.spectrum.dim() == 3);
    CHECK(c.grid.tau.count == 10);

    const auto again = parse_config(to_json(c));
    CHECK(to_json(again) == to_json(c));
    CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), IoError);
}
