// lzs: sweep, trace, analyze, fft, fit-gap.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lzs/analysis.hpp"
#include "lzs/analytic.hpp"
#include "lzs/errors.hpp"
#include "lzs/io.hpp"
#include "lzs/report.hpp"
#include "lzs/run_config.hpp"
#include "lzs/sweep.hpp"

namespace fs = std::filesystem;
using namespace lzs;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNumeric = 3, kIo = 4 };

struct CommonOptions {
    std::string preset;
    std::string config;
    std::string out;
    int workers = 0;
    bool pgm = false;
    double tolerance = 0.0;  // 0: keep the configured value
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--preset", o.preset, "fig1b, fig4a, fig4b or fig4c");
    cmd->add_option("--config", o.config, "JSON run configuration (comments allowed)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "OpenMP worker count (0: machine default)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--pgm", o.pgm, "also write a PGM heatmap");
    cmd->add_option("--tolerance", o.tolerance, "relative integration tolerance")
        ->check(CLI::PositiveNumber);
}

RunConfig resolve(const CommonOptions& o) {
    RunConfig cfg = o.preset.empty() ? RunConfig{} : make_preset(o.preset);
    if (!o.config.empty()) cfg = load_config_file(o.config, cfg);
    if (!o.out.empty()) cfg.outputs.dir = o.out;
    if (o.pgm) cfg.outputs.pgm = true;
    if (o.tolerance > 0.0) {
        cfg.stepper.rel_tol = o.tolerance;
        cfg.stepper.validate();
    }
    return cfg;
}

fs::path output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

std::string stem_of(const std::string& path) {
    return fs::path(path).stem().string();
}

int cmd_sweep(const CommonOptions& o) {
    const RunConfig cfg = resolve(o);
    cfg.grid.validate();
    SweepOptions so;
    so.workers = o.workers;
    so.collect_diagnostics = true;
    const auto result = run_sweep(cfg.grid, cfg.spectrum, cfg.stepper, so);
    const fs::path dir = output_dir(cfg.outputs.dir);
    if (cfg.outputs.csv) {
        const auto path = (dir / (cfg.outputs.name + ".csv")).string();
        write_map_csv_file(path, result.map);
        std::cout << "wrote " << path << '\n';
    }
    if (cfg.outputs.pgm) {
        const auto path = (dir / (cfg.outputs.name + ".pgm")).string();
        write_map_pgm_file(path, result.map);
        std::cout << "wrote " << path << '\n';
    }
    const auto& d = result.diagnostics;
    std::cout << "cells " << cfg.grid.cell_count() << ", steps " << d.total_steps
              << ", max |tr-1| " << d.max_trace_deviation << ", min eigenvalue " << d.min_eigenvalue
              << ", max |tr rho^2 - 1| " << d.max_purity_deviation << '\n';
    return kOk;
}

int cmd_trace(const CommonOptions& o, double phi_f, double tau, std::size_t stride) {
    RunConfig cfg = resolve(o);
    cfg.stepper.trajectory_stride = stride;
    const TrianglePulse pulse(cfg.grid.phi_i, phi_f, tau);
    const auto result = evolve(cfg.spectrum, pulse, cfg.stepper);
    const fs::path dir = output_dir(cfg.outputs.dir);
    const auto path = (dir / (cfg.outputs.name + "_trace.csv")).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_trajectory_csv(out, result,
                         "phi_i=" + format_number(cfg.grid.phi_i) + " phi_f=" + format_number(phi_f) +
                             " tau=" + format_number(tau));
    if (!out) throw IoError("write failed for '" + path + "'");
    std::cout << "wrote " << path << '\n';
    std::cout << "final W11 " << format_number(population(result.final_state, 0)) << ", steps "
              << result.step_count << ", max |tr-1| " << result.max_trace_deviation << '\n';
    return kOk;
}

struct AnalyzeArgs {
    std::string map;
    std::string out = ".";
    double tolerance = 0.1;
    double location = std::numeric_limits<double>::quiet_NaN();
    double variance_threshold = 1e-3;
    double distortion_threshold = 0.2;
    double slope_column = std::numeric_limits<double>::quiet_NaN();
    double gap_bound = std::numeric_limits<double>::quiet_NaN();
    double gap_tau = 3.85;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const auto map = read_map_csv_file(a.map);
    AnalyzeOptions opt;
    opt.gap.tolerance = a.tolerance;
    opt.reference_location = a.location;
    opt.locate.variance_threshold = a.variance_threshold;
    opt.locate.distortion_threshold = a.distortion_threshold;
    opt.slope_column = a.slope_column;
    opt.gap_bound = a.gap_bound;
    opt.gap_tau = a.gap_tau;
    const auto fit = analyze_map(map, opt);

    write_fit_report_text(std::cout, fit);
    const fs::path dir = output_dir(a.out);
    const std::string stem = stem_of(a.map);
    const auto txt = (dir / (stem + "_fit.txt")).string();
    const auto kv = (dir / (stem + "_fit.kv")).string();
    std::ofstream t(txt), k(kv);
    if (!t || !k) throw IoError("cannot write report files in '" + a.out + "'");
    write_fit_report_text(t, fit);
    write_fit_report_kv(k, fit);
    if (!t || !k) throw IoError("write failed in '" + a.out + "'");
    std::cout << "wrote " << txt << "\nwrote " << kv << '\n';
    return kOk;
}

int cmd_fft(const std::string& path, double phi_f, double phi_f_min, bool hann, double location) {
    const auto map = read_map_csv_file(path);
    const FftWindow w = hann ? FftWindow::Hann : FftWindow::Flat;
    if (std::isfinite(phi_f_min)) {
        const auto lin = fft_linearity(map, phi_f_min, w);
        std::cout << "phi_f_mPhi0,omega_rad_per_ns,period_ns,power\n";
        for (const auto& c : lin.columns)
            std::cout << format_number(c.phi_f) << ',' << format_number(c.dominant_omega) << ','
                      << format_number(c.dominant_omega > 0 ? 2 * std::numbers::pi / c.dominant_omega : 0.0)
                      << ',' << format_number(c.power) << '\n';
        std::cout << "slope " << format_number(lin.slope) << " intercept " << format_number(lin.intercept)
                  << " rms_residual " << format_number(lin.rms_residual) << '\n';
        return kOk;
    }
    const auto c = column_fft(map, phi_f, w);
    std::cout << "phi_f " << format_number(c.phi_f) << " mPhi0\n"
              << "dominant_omega " << format_number(c.dominant_omega) << " rad/ns\n"
              << "period " << format_number(c.dominant_omega > 0 ? 2 * std::numbers::pi / c.dominant_omega : 0.0)
              << " ns\n"
              << "power " << format_number(c.power) << '\n'
              << "resolution " << format_number(c.resolution) << " rad/ns\n";
    if (c.dominant_omega > 0 && std::isfinite(map.grid.phi_i) && c.phi_f > location &&
        map.grid.phi_i < location) {
        std::cout << "slope " << format_number(slope_from_period(2 * std::numbers::pi / c.dominant_omega,
                                                                 c.phi_f, map.grid.phi_i, location))
                  << " rad/ns per mPhi0 (anticrossing at " << format_number(location) << ")\n";
    }
    return kOk;
}

GapPoint parse_point(const std::string& text) {
    GapPoint p;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> p.phi_f >> c1 >> p.tau >> c2 >> p.population) || c1 != ',' || c2 != ',' || !in.eof())
        throw ValidationError("point must be 'phi_f,tau,population', got '" + text + "'");
    return p;
}

int cmd_fit_gap(const std::vector<std::string>& point_text, double slope, double phi_i,
                const GapFitOptions& opt) {
    std::vector<GapPoint> pts;
    for (const auto& t : point_text) pts.push_back(parse_point(t));
    const auto fit = fit_gap(pts, slope, phi_i, opt);
    std::cout << "gap " << format_number(fit.gap) << " rad/ns (sse " << format_number(fit.sse) << ")\n";
    std::cout << "candidates:";
    for (const auto& c : fit.candidates)
        std::cout << ' ' << format_number(c.gap) << " (sse " << format_number(c.sse) << ", max residual "
                  << format_number(c.max_residual) << ")";
    std::cout << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LZS interference maps: simulate and extract spectra"};
    app.require_subcommand(1);

    CommonOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "simulate an interference map");
    add_common(sweep, sweep_opt);

    CommonOptions trace_opt;
    double trace_phi_f = 0.0, trace_tau = 0.0;
    std::size_t trace_stride = 1;
    auto* trace = app.add_subcommand("trace", "density-matrix trajectory of one pulse");
    add_common(trace, trace_opt);
    trace->add_option("--phi-f", trace_phi_f, "pulse amplitude (mPhi0)")->required();
    trace->add_option("--tau", trace_tau, "pulse width (ns)")->required();
    trace->add_option("--stride", trace_stride, "keep every n-th accepted step")->check(CLI::PositiveNumber);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "fit slope, gaps and anticrossings to a map CSV");
    analyze->add_option("map", an.map, "map CSV")->required();
    analyze->add_option("--out", an.out, "report directory");
    analyze->add_option("--tolerance", an.tolerance, "gap fit: max population residual per point")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--location", an.location, "anticrossing the fits refer to (default: located)");
    analyze->add_option("--variance-threshold", an.variance_threshold, "relative column variance onset");
    analyze->add_option("--distortion-threshold", an.distortion_threshold, "fringe spacing deviation");
    analyze->add_option("--slope-column", an.slope_column, "phi_f column for the slope fit");
    analyze->add_option("--gap-bound", an.gap_bound, "gap bound for the large-amplitude check");
    analyze->add_option("--gap-tau", an.gap_tau, "tau row for the gap-fit points (ns)");

    std::string fft_map;
    double fft_phi_f = 8.0, fft_phi_f_min = std::numeric_limits<double>::quiet_NaN(), fft_location = 0.0;
    bool fft_hann = false;
    auto* fft = app.add_subcommand("fft", "dominant frequency of a map column");
    fft->add_option("map", fft_map, "map CSV")->required();
    fft->add_option("--phi-f", fft_phi_f, "column (mPhi0)");
    fft->add_option("--phi-f-min", fft_phi_f_min, "linear fit of 2 pi/T over columns >= this");
    fft->add_option("--location", fft_location, "anticrossing for the slope estimate");
    fft->add_flag("--hann", fft_hann, "Hann window instead of none");

    std::vector<std::string> gap_points;
    double gap_slope = 2.0, gap_phi_i = -5.0;
    GapFitOptions gap_opt;
    auto* fit_gap_cmd = app.add_subcommand("fit-gap", "scan the gap against (phi_f, tau, W11) points");
    fit_gap_cmd->add_option("--point", gap_points, "phi_f,tau,population (repeatable)")->required();
    fit_gap_cmd->add_option("--slope", gap_slope, "energy slope l (rad/ns per mPhi0)");
    fit_gap_cmd->add_option("--phi-i", gap_phi_i, "initial detuning (mPhi0)");
    fit_gap_cmd->add_option("--location", gap_opt.location, "anticrossing location (mPhi0)");
    fit_gap_cmd->add_option("--gap-max", gap_opt.gap_max, "scan upper bound (rad/ns)");
    fit_gap_cmd->add_option("--gap-step", gap_opt.gap_step, "scan step (rad/ns)");
    fit_gap_cmd->add_option("--tolerance", gap_opt.tolerance, "max population residual per point")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }

    try {
        if (*sweep) return cmd_sweep(sweep_opt);
        if (*trace) return cmd_trace(trace_opt, trace_phi_f, trace_tau, trace_stride);
        if (*analyze) return cmd_analyze(an);
        if (*fft) return cmd_fft(fft_map, fft_phi_f, fft_phi_f_min, fft_hann, fft_location);
        if (*fit_gap_cmd) return cmd_fit_gap(gap_points, gap_slope, gap_phi_i, gap_opt);
    } catch (const CellFailure& e) {
        std::cerr << "error: cell phi_f=" << e.phi_f() << " tau=" << e.tau() << ": " << e.what() << '\n';
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const IntegrationError& e) {
        std::cerr << "error: " << e.what() << " (t = " << e.time_reached() << " ns)\n";
        return kNumeric;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kOk;
}
