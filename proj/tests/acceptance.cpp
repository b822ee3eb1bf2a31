// Acceptance suite: one PASS/FAIL line per criterion.
//
//   lzs_acceptance [--only N[,N...]] [--expect-fail N[,N...]]
//
// Exit status is 0 when every criterion outside the expected-failure list
// passes. An expected failure that passes is reported as XPASS and does not
// fail the run.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lzs/analysis.hpp"
#include "lzs/analytic.hpp"
#include "lzs/run_config.hpp"
#include "lzs/sweep.hpp"
#include "oracles.hpp"

using namespace lzs;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances, fixed by the acceptance criteria.
constexpr double kPeriodMin = 0.60, kPeriodMax = 0.75;  // ns, criterion 1
constexpr double kColumnBudget = 60.0;                  // s, criterion 1
constexpr double kSlopeTol = 0.10;                      // criterion 2
constexpr double kGapTol = 0.10;                        // criterion 3
constexpr double kLinearityTol = 0.15;                  // criterion 4
constexpr double kPhaseTol = 1e-10;                     // criterion 5
constexpr int kPhaseDraws = 1000;
constexpr double kTraceTol = 1e-8, kEigTol = 1e-8, kPurityTol = 1e-6;  // criterion 6
constexpr double kOracleTol = 1e-6, kOracleStep = 1e-5;                // criterion 7
constexpr int kOracleSets = 10;
constexpr double kOrderFactor = 2.0;
constexpr double kQuietVar = 1e-3, kLoudVar = 1e-2, kLocateTol = 0.5;  // criterion 8
constexpr double kRegion1Tol = 0.10, kRegion3Fraction = 0.30;          // criterion 9

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream o;
    o.precision(digits);
    o << v;
    return o.str();
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SweepResult sweep_1t(const GridSpec& g, const QubitSpectrum& s) {
    SweepOptions o;
    o.workers = 1;
    o.collect_diagnostics = true;
    return run_sweep(g, s, StepperConfig{}, o);
}

double column_variance(const InterferenceMap& m, std::size_t j) {
    const std::size_t n = m.grid.tau.count;
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += m.at(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) var += (m.at(i, j) - mean) * (m.at(i, j) - mean);
    return var / static_cast<double>(n);
}

// Shared by criteria 2 and 6.
const SweepResult& fig1b_map() {
    static const SweepResult r = [] {
        const auto cfg = make_preset("fig1b");
        return sweep_1t(cfg.grid, cfg.spectrum);
    }();
    return r;
}

Outcome criterion1() {
    const auto cfg = make_preset("fig1b");
    const GridSpec g{AxisRange{8.0, 8.0, 1}, cfg.grid.tau, cfg.grid.phi_i};
    const auto t0 = Clock::now();
    const auto r = sweep_1t(g, cfg.spectrum);
    const double elapsed = seconds_since(t0);
    const auto s = column_fft(r.map, 8.0);
    const double period = 2.0 * std::numbers::pi / s.dominant_omega;
    return {period >= kPeriodMin && period <= kPeriodMax && elapsed < kColumnBudget,
            "T = " + fmt(period) + " ns (want [0.60, 0.75]), column took " + fmt(elapsed, 3) + " s (< 60)"};
}

double g_slope = std::nan("");

Outcome criterion2() {
    const auto fit = fit_slope(fig1b_map().map, 8.0);
    g_slope = fit.slope;
    const double rel = std::abs(fit.slope - 2.0) / 2.0;
    return {rel <= kSlopeTol, "l = " + fmt(fit.slope) + " from T = " + fmt(fit.period) + " ns at phi_f = " +
                                  fmt(fit.phi_f) + " (relative error " + fmt(rel, 3) + ", want <= 0.10)"};
}

Outcome criterion3() {
    if (std::isnan(g_slope)) g_slope = fit_slope(fig1b_map().map, 8.0).slope;
    const std::vector<GapPoint> pts{{1.0, 3.85, 0.00}, {2.0, 3.85, 0.93}};
    const auto fit = fit_gap(pts, g_slope, -5.0);
    const double rel = std::abs(fit.gap - 2.0) / 2.0;
    std::string others;
    for (std::size_t i = 1; i < fit.candidates.size(); ++i) others += " " + fmt(fit.candidates[i].gap);
    return {rel <= kGapTol, "gap = " + fmt(fit.gap) + " with l = " + fmt(g_slope) + " (relative error " + fmt(rel, 3) +
                                ", want <= 0.10); other candidates:" + (others.empty() ? " none" : others)};
}

Outcome criterion4() {
    const GridSpec g{AxisRange{40.0, 80.0, 9}, AxisRange{0.01, 4.0, 400}, -5.0};
    const auto r = sweep_1t(g, QubitSpectrum::two_level(2.0, 2.0));
    const auto lin = fft_linearity(r.map, 40.0);
    const double rel = std::abs(lin.slope - 2.0) / 2.0;
    return {rel <= kLinearityTol, "d(2pi/T)/d(phi_f) = " + fmt(lin.slope) + " over phi_f in [40, 80] (relative error " +
                                      fmt(rel, 3) + ", want <= 0.15), rms residual " + fmt(lin.rms_residual, 3)};
}

Outcome criterion5() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ul(0.5, 4.0), ug(0.05, 8.0), ui(-20.0, -0.1), uf(0.05, 80.0),
        ut(0.01, 5.0);
    double worst = 0.0;
    for (int n = 0; n < kPhaseDraws; ++n) {
        const double l = ul(rng), g = ug(rng), pi_ = ui(rng), pf = uf(rng), tau = ut(rng);
        const double closed = stueckelberg_phase(l, g, TrianglePulse(pi_, pf, tau)).phi;
        const double quad = lzs_oracle::quadrature_phase(l, g, pi_, pf, tau);
        worst = std::max(worst, std::abs(closed - quad) / quad);
    }
    return {worst <= kPhaseTol, "max relative error " + fmt(worst, 3) + " over 1000 draws (want <= 1e-10)"};
}

Outcome criterion6() {
    const auto& d = fig1b_map().diagnostics;
    const double purity = d.max_purity_deviation;
    const bool ok = d.max_trace_deviation <= kTraceTol && d.min_eigenvalue >= -kEigTol && purity <= kPurityTol;
    return {ok, "max |tr-1| " + fmt(d.max_trace_deviation, 3) + ", min eigenvalue " + fmt(d.min_eigenvalue, 3) +
                    ", max |tr rho^2-1| " + fmt(purity, 3) + " over 96000 cells"};
}

Outcome criterion7() {
    StepperConfig rk4;
    rk4.method = StepMethod::FixedRk4;
    rk4.initial_step = kOracleStep;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ul(1.0, 3.0), ug(0.5, 4.0), uf(1.0, 10.0), ut(0.1, 4.0);
    double worst = 0.0;
    for (int n = 0; n < kOracleSets; ++n) {
        const auto s = QubitSpectrum::two_level(ul(rng), ug(rng));
        const TrianglePulse p(-5.0, uf(rng), ut(rng));
        const double a = population(evolve(s, p).final_state, 0);
        const double o = population(evolve(s, p, rk4).final_state, 0);
        worst = std::max(worst, std::abs(a - o));
    }

    const auto s = QubitSpectrum::two_level(2.0, 2.0);
    const TrianglePulse p(-5.0, 40.0, 1.0);
    StepperConfig ref;
    ref.rel_tol = 1e-13;
    ref.abs_tol = 1e-15;
    ref.max_step = 1e-3;
    const double exact = population(evolve(s, p, ref).final_state, 0);
    auto err = [&](double h) {
        StepperConfig c = rk4;
        c.initial_step = h;
        return std::abs(population(evolve(s, p, c).final_state, 0) - exact);
    };
    const double e1 = err(2e-4), e2 = err(1e-4), e3 = err(5e-5);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    // order 4 within a factor 2 in the error ratio: ratio in [8, 32]
    auto order_ok = [](double o) { return o >= 4.0 - std::log2(kOrderFactor) && o <= 4.0 + std::log2(kOrderFactor); };
    return {worst <= kOracleTol && order_ok(o1) && order_ok(o2),
            "max |dW11| vs 1e-5 ns RK4 " + fmt(worst, 3) + " on 10 sets (want <= 1e-6); RK4 orders " + fmt(o1, 3) +
                ", " + fmt(o2, 3) + " (want 4 +- 1)"};
}

Outcome criterion8() {
    const auto cfg = make_preset("fig4a");
    const auto r = sweep_1t(cfg.grid, cfg.spectrum);
    const auto& m = r.map;
    double quiet_max = 0.0, loud_min = 1e300;
    for (std::size_t j = 0; j < m.grid.phi_f.count; ++j) {
        const double pf = m.grid.phi_f.at(j);
        const double v = column_variance(m, j);
        if (pf > 0.5 && pf < 7.5) quiet_max = std::max(quiet_max, v);
        if (pf > 8.5 && pf < 10.0) loud_min = std::min(loud_min, v);
    }
    LocateOptions lo;
    lo.slope = cfg.spectrum.left_slope();
    const auto loc = locate_anticrossings(m, lo);
    bool found = false;
    std::string listed;
    for (double x : loc) {
        found = found || std::abs(x - 8.0) <= kLocateTol;
        listed += " " + fmt(x);
    }
    const bool ok = quiet_max < kQuietVar && loud_min > kLoudVar && found;
    return {ok, "max var(0.5, 7.5) = " + fmt(quiet_max, 3) + " (want < 1e-3), min var(8.5, 10) = " + fmt(loud_min, 3) +
                    " (want > 1e-2), located:" + (listed.empty() ? " none" : listed) + " (want 8 +- 0.5)"};
}

// Region 1 is judged where the single-anticrossing prediction is meant to
// hold (large amplitude for the first crossing, l phi_f / gap12 >= 4) by the
// median relative spacing deviation; Region 3 by the fraction of its cells
// (phi_f > 0) deviating by more than the distortion threshold.
Outcome criterion9() {
    const auto cfg = make_preset("fig4b");
    const auto r = sweep_1t(cfg.grid, cfg.spectrum);
    const auto& m = r.map;
    const double l = cfg.spectrum.left_slope();
    const double g12 = cfg.spectrum.anticrossings()[0].gap, g13 = cfg.spectrum.anticrossings()[1].gap;
    const double k12 = characteristic_sweep_rate(g12, l), k13 = characteristic_sweep_rate(g13, l);
    const auto labels = classify_regions(m, g12, g13, l);
    const auto field = fringe_spacing_field(m);
    const LocateOptions defaults;

    std::vector<double> dev1;
    std::size_t n3 = 0, distorted3 = 0, cells1 = 0, cells3 = 0;
    const std::size_t np = m.grid.phi_f.count;
    for (std::size_t i = 0; i < m.grid.tau.count; ++i) {
        for (std::size_t j = 0; j < np; ++j) {
            const double pf = m.grid.phi_f.at(j);
            const int label = labels[i * np + j];
            cells1 += label == 1;
            cells3 += label == 3;
            const double s = field[i * np + j];
            if (std::isnan(s) || pf <= 0.0) continue;
            const double dev = std::abs(s - predicted_spacing(l, m.grid.phi_i, pf, 0.0)) /
                               predicted_spacing(l, m.grid.phi_i, pf, 0.0);
            if (label == 1 && l * pf / g12 >= kLargeAmplitudeRatio) dev1.push_back(dev);
            if (label == 3) {
                ++n3;
                distorted3 += dev > defaults.distortion_threshold;
            }
        }
    }
    std::nth_element(dev1.begin(), dev1.begin() + static_cast<std::ptrdiff_t>(dev1.size() / 2), dev1.end());
    const double med1 = dev1.empty() ? std::nan("") : dev1[dev1.size() / 2];
    const double frac3 = n3 ? static_cast<double>(distorted3) / static_cast<double>(n3) : 0.0;
    const bool partitioned = cells1 > 0 && cells3 > 0;
    const bool ok = partitioned && med1 <= kRegion1Tol && frac3 >= kRegion3Fraction;
    return {ok, "k12 = " + fmt(k12) + ", k13 = " + fmt(k13) + "; Region 1 median spacing deviation " + fmt(med1, 3) +
                    " over " + std::to_string(dev1.size()) + " cells (want <= 0.10); Region 3 distorted fraction " +
                    fmt(frac3, 3) + " over " + std::to_string(n3) + " cells (want >= 0.30)"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LZS_CLI_PATH) + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion10() {
    const fs::path dir = fs::temp_directory_path() / ("lzs_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::vector<std::string> bytes;
    std::string codes;
    for (int workers : {1, 2, 4}) {
        const fs::path out = dir / ("w" + std::to_string(workers));
        const int code = run_cli("sweep --preset fig1b --workers " + std::to_string(workers) + " --out " + out.string());
        codes += " " + std::to_string(code);
        std::ifstream in(out / "fig1b.csv", std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        bytes.push_back(s.str());
    }
    fs::remove_all(dir);
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1] && bytes[1] == bytes[2];
    return {same && codes == " 0 0 0", "workers 1/2/4 exit codes" + codes + ", CSV size " +
                                           std::to_string(bytes[0].size()) + " bytes, identical: " +
                                           (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, expect_fail;
    for (int a = 1; a < argc; ++a) {
        const std::string arg = argv[a];
        if (arg == "--only" && a + 1 < argc) {
            only = parse_list(argv[++a]);
        } else if (arg == "--expect-fail" && a + 1 < argc) {
            expect_fail = parse_list(argv[++a]);
        } else {
            std::cerr << "usage: lzs_acceptance [--only N,..] [--expect-fail N,..]\n";
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"column period", criterion1},          {"slope round trip", criterion2},
        {"gap round trip", criterion3},            {"FFT linearity", criterion4},
        {"closed form vs quadrature", criterion5}, {"integrator invariants", criterion6},
        {"oracle equivalence", criterion7},        {"three-level case 1", criterion8},
        {"three-level case 2", criterion9},        {"determinism", criterion10},
    };

    int unexpected = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        const int id = static_cast<int>(n + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[n].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const bool expected_fail = expect_fail.count(id) > 0;
        const char* tag = o.pass ? (expected_fail ? "XPASS" : "PASS") : (expected_fail ? "FAIL (expected)" : "FAIL");
        if (!o.pass && !expected_fail) ++unexpected;
        std::cout << "criterion " << id << " [" << tag << "] " << criteria[n].first << ": " << o.detail << " ("
                  << fmt(seconds_since(t0), 3) << " s)" << std::endl;
    }
    return unexpected == 0 ? 0 : 1;
}
