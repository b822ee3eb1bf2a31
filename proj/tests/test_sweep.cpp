#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lzs/errors.hpp"
#include "lzs/sweep.hpp"

using namespace lzs;

namespace {

GridSpec small_grid() {
    return GridSpec{AxisRange{-1.0, 9.0, 9}, AxisRange{0.05, 2.0, 12}, -5.0};
}

double column_variance(const InterferenceMap& map, std::size_t j) {
    const auto n = map.grid.tau.count;
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += map.at(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) var += (map.at(i, j) - mean) * (map.at(i, j) - mean);
    return var / static_cast<double>(n);
}

}  // namespace

TEST_CASE("axis nodes") {
    const AxisRange a{-2.0, 10.0, 240};
    CHECK(a.at(0) == -2.0);
    CHECK(a.at(239) == 10.0);
    CHECK(a.step() == doctest::Approx(12.0 / 239.0));
    CHECK(AxisRange{3.0, 3.0, 1}.at(0) == 3.0);
    CHECK(AxisRange{3.0, 3.0, 1}.step() == 0.0);
}

TEST_CASE("grid validation") {
    CHECK_NOTHROW(small_grid().validate());
    auto g = small_grid();
    g.tau.count = 0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = small_grid();
    g.phi_f = {5.0, 1.0, 3};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = small_grid();
    g.tau = {0.0, 1.0, 3};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = small_grid();
    g.phi_f = {-5.0, 5.0, 3};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    CHECK_THROWS_AS(run_sweep(g, QubitSpectrum::two_level(2, 2), {}), ValidationError);
}

TEST_CASE("single cell equals a direct evolve") {
    const GridSpec g{AxisRange{8.0, 8.0, 1}, AxisRange{1.0, 1.0, 1}, -5.0};
    const auto s = QubitSpectrum::two_level(2.0, 2.0);
    const auto r = run_sweep(g, s, {});
    REQUIRE(r.map.values.size() == 1);
    const double direct = population(evolve(s, TrianglePulse(-5.0, 8.0, 1.0)).final_state, 0);
    CHECK(r.map.values[0] == direct);
    CHECK(cell_population(s, -5.0, 8.0, 1.0, {}) == direct);
}

TEST_CASE("parallel sweep equals the serial reference bit for bit") {
    const auto s = QubitSpectrum::three_level(2.0, 2.0, 8.0);
    const auto serial = run_sweep_serial(small_grid(), s, {}, true);
    for (int workers : {1, 2, 3, 8}) {
        SweepOptions o;
        o.workers = workers;
        o.collect_diagnostics = true;
        const auto par = run_sweep(small_grid(), s, {}, o);
        CHECK(par.map.values == serial.map.values);
        CHECK(par.diagnostics.total_steps == serial.diagnostics.total_steps);
        CHECK(par.diagnostics.max_trace_deviation == serial.diagnostics.max_trace_deviation);
    }
    CHECK(serial.diagnostics.max_trace_deviation <= 1e-8);
    CHECK(serial.diagnostics.min_eigenvalue >= -1e-8);
    CHECK(serial.diagnostics.max_purity_deviation <= 1e-6);
    for (double v : serial.map.values) {
        CHECK(v >= -1e-8);
        CHECK(v <= 1.0 + 1e-8);
    }
}

TEST_CASE("a failing cell aborts the sweep and names its coordinates") {
    StepperConfig c;
    c.max_steps = 400;
    // Short pulses fit in the budget, the long ones do not.
    const GridSpec g{AxisRange{6.0, 10.0, 3}, AxisRange{0.05, 4.0, 6}, -5.0};
    for (int workers : {1, 3}) {
        SweepOptions o;
        o.workers = workers;
        try {
            run_sweep(g, QubitSpectrum::two_level(2.0, 2.0), c, o);
            FAIL("expected CellFailure");
        } catch (const CellFailure& e) {
            CHECK(e.tau() > 0.05);
            CHECK(e.phi_f() >= 6.0);
            try {
                cell_population(QubitSpectrum::two_level(2.0, 2.0), -5.0, e.phi_f(), e.tau(), c);
                FAIL("reported cell should fail on its own");
            } catch (const IntegrationError&) {
            }
        }
    }
    CHECK_THROWS_AS(run_sweep_serial(g, QubitSpectrum::two_level(2.0, 2.0), c), CellFailure);
}

// Below the crossing the only dynamics is the small rotation caused by
// starting in the diabatic state |L0> rather than the ground state, of order
// (gap / (2 l phi_i))^2.
TEST_CASE("no crossing, no interference") {
    const GridSpec g{AxisRange{-2.0, -0.5, 4}, AxisRange{0.01, 4.0, 400}, -5.0};
    const auto weak = run_sweep(g, QubitSpectrum::two_level(2.0, 0.5), {});
    for (std::size_t j = 0; j < g.phi_f.count; ++j) CHECK(column_variance(weak.map, j) < 1e-4);

    const GridSpec far{AxisRange{-4.0, -2.0, 5}, AxisRange{0.01, 4.0, 400}, -5.0};
    const auto r = run_sweep(far, QubitSpectrum::two_level(2.0, 2.0), {});
    for (double v : r.map.values) CHECK(v > 0.9);
}

TEST_CASE("column extraction") {
    InterferenceMap m;
    m.grid = GridSpec{AxisRange{0.0, 1.0, 3}, AxisRange{1.0, 3.0, 3}, -5.0};
    m.values = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    auto col = extract_column(m, 0.5);
    REQUIRE(col.size() == 3);
    CHECK(col[0].tau == 1.0);
    CHECK(col[2].tau == 3.0);
    CHECK(col[0].population == 1.0);
    CHECK(col[2].population == 7.0);
    CHECK(nearest_column(m, 0.25) == 0);  // tie goes to the lower node
    CHECK(nearest_column(m, 0.26) == 1);
    CHECK(nearest_column(m, 0.75) == 1);
    CHECK(nearest_column(m, 1.0) == 2);
    CHECK_THROWS_AS(extract_column(m, 1.5), DomainError);
    CHECK_THROWS_AS(extract_column(m, -0.1), DomainError);
}
