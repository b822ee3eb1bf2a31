#include "lzs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <limits>
#include <sstream>

#include <omp.h>

#include "lzs/errors.hpp"

namespace lzs {

double AxisRange::at(std::size_t i) const {
    if (count <= 1) {
        return min;
    }
    if (i + 1 == count) {
        return max;
    }
    return min + static_cast<double>(i) * (max - min) / static_cast<double>(count - 1);
}

double AxisRange::step() const {
    return count <= 1 ? 0.0 : (max - min) / static_cast<double>(count - 1);
}

void GridSpec::validate() const {
    auto check_axis = [](const AxisRange& axis, const char* name) {
        if (axis.count < 1) {
            throw ValidationError(std::string(name) + " axis needs at least one node");
        }
        if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) {
            throw ValidationError(std::string(name) + " axis bounds must be finite");
        }
        if (axis.count > 1 && !(axis.min < axis.max)) {
            throw ValidationError(std::string(name) + " axis needs min < max when count > 1");
        }
    };
    check_axis(phi_f, "phi_f");
    check_axis(tau, "tau");
    if (!(tau.min > 0.0)) {
        throw ValidationError("tau axis must be strictly positive");
    }
    if (!std::isfinite(phi_i)) {
        throw ValidationError("phi_i must be finite");
    }
    for (std::size_t j = 0; j < phi_f.count; ++j) {
        if (phi_f.at(j) == phi_i) {
            std::ostringstream msg;
            msg << "phi_f node " << phi_f.at(j) << " equals phi_i (degenerate pulse)";
            throw ValidationError(msg.str());
        }
    }
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

struct CellStats {
    double trace_dev = 0.0;
    double herm = 0.0;
    double min_eig = 1.0;
    double purity_dev = 0.0;
    std::size_t steps = 0;
};

double run_cell(const QubitSpectrum& spectrum, const GridSpec& grid, std::size_t tau_index,
                std::size_t phi_f_index, const StepperConfig& config, CellStats* stats) {
    const TrianglePulse pulse(grid.phi_i, grid.phi_f.at(phi_f_index), grid.tau.at(tau_index));
    const EvolutionResult r = evolve(spectrum, pulse, config);
    if (stats != nullptr) {
        stats->trace_dev = r.max_trace_deviation;
        stats->herm = hermiticity_error(r.final_state);
        stats->min_eig = min_eigenvalue(r.final_state);
        stats->purity_dev = std::abs(purity(r.final_state) - 1.0);
        stats->steps = r.step_count;
    }
    return population(r.final_state, 0);
}

SweepDiagnostics reduce(const std::vector<CellStats>& stats) {
    SweepDiagnostics d;
    for (const auto& s : stats) {
        d.max_trace_deviation = std::max(d.max_trace_deviation, s.trace_dev);
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, s.herm);
        d.min_eigenvalue = std::min(d.min_eigenvalue, s.min_eig);
        d.max_purity_deviation = std::max(d.max_purity_deviation, s.purity_dev);
        d.total_steps += s.steps;
    }
    return d;
}

SweepResult prepare(const GridSpec& grid, const QubitSpectrum& spectrum,
                    const StepperConfig& config) {
    grid.validate();
    config.validate();
    SweepResult result;
    result.map.grid = grid;
    result.map.values.assign(grid.cell_count(), std::numeric_limits<double>::quiet_NaN());
    result.map.metadata = MapMetadata{spectrum, config, utc_timestamp()};
    return result;
}

[[noreturn]] void rethrow_cell(const GridSpec& grid, std::size_t cell, std::exception_ptr err) {
    const std::size_t tau_index = cell / grid.phi_f.count;
    const std::size_t phi_f_index = cell % grid.phi_f.count;
    const double phi_f = grid.phi_f.at(phi_f_index);
    const double tau = grid.tau.at(tau_index);
    std::ostringstream where;
    where << "cell (phi_f = " << phi_f << " mPhi0, tau = " << tau << " ns) failed: ";
    try {
        std::rethrow_exception(err);
    } catch (const IntegrationError& e) {
        throw CellFailure(where.str() + e.what(), e.time_reached(), phi_f, tau);
    } catch (const std::exception& e) {
        throw CellFailure(where.str() + e.what(), 0.0, phi_f, tau);
    }
}

}  // namespace

double cell_population(const QubitSpectrum& spectrum, double phi_i, double phi_f, double tau,
                       const StepperConfig& config) {
    const TrianglePulse pulse(phi_i, phi_f, tau);
    return population(evolve(spectrum, pulse, config).final_state, 0);
}

SweepResult run_sweep(const GridSpec& grid, const QubitSpectrum& spectrum,
                      const StepperConfig& config, const SweepOptions& options) {
    SweepResult result = prepare(grid, spectrum, config);
    const auto n_cells = static_cast<std::int64_t>(grid.cell_count());
    const std::size_t n_phi = grid.phi_f.count;
    std::vector<CellStats> stats(options.collect_diagnostics ? grid.cell_count() : 0);
    std::vector<std::exception_ptr> errors(grid.cell_count());
    std::atomic<std::int64_t> first_failure{n_cells};
    double* out = result.map.values.data();

    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (std::int64_t cell = 0; cell < n_cells; ++cell) {
        // Cells below the lowest known failure still run, so the reported
        // failure is the lowest failing index regardless of scheduling.
        if (cell > first_failure.load(std::memory_order_relaxed)) {
            continue;
        }
        const auto idx = static_cast<std::size_t>(cell);
        try {
            out[idx] = run_cell(spectrum, grid, idx / n_phi, idx % n_phi, config,
                                stats.empty() ? nullptr : &stats[idx]);
        } catch (...) {
            errors[idx] = std::current_exception();
            std::int64_t prev = first_failure.load();
            while (cell < prev && !first_failure.compare_exchange_weak(prev, cell)) {
            }
        }
    }

    const std::int64_t failed = first_failure.load();
    if (failed < n_cells) {
        rethrow_cell(grid, static_cast<std::size_t>(failed), errors[static_cast<std::size_t>(failed)]);
    }
    if (options.collect_diagnostics) {
        result.diagnostics = reduce(stats);
    }
    return result;
}

SweepResult run_sweep_serial(const GridSpec& grid, const QubitSpectrum& spectrum,
                             const StepperConfig& config, bool collect_diagnostics) {
    SweepResult result = prepare(grid, spectrum, config);
    std::vector<CellStats> stats(collect_diagnostics ? grid.cell_count() : 0);
    for (std::size_t i = 0; i < grid.tau.count; ++i) {
        for (std::size_t j = 0; j < grid.phi_f.count; ++j) {
            const std::size_t idx = i * grid.phi_f.count + j;
            try {
                result.map.values[idx] =
                    run_cell(spectrum, grid, i, j, config, stats.empty() ? nullptr : &stats[idx]);
            } catch (...) {
                rethrow_cell(grid, idx, std::current_exception());
            }
        }
    }
    if (collect_diagnostics) {
        result.diagnostics = reduce(stats);
    }
    return result;
}

std::size_t nearest_column(const InterferenceMap& map, double phi_f) {
    const AxisRange& axis = map.grid.phi_f;
    if (!(phi_f >= axis.min && phi_f <= axis.max)) {
        std::ostringstream msg;
        msg << "phi_f = " << phi_f << " outside map range [" << axis.min << ", " << axis.max << "]";
        throw DomainError(msg.str());
    }
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < axis.count; ++j) {
        const double dist = std::abs(axis.at(j) - phi_f);
        if (dist < best_dist) {  // strict: ties keep the lower node
            best_dist = dist;
            best = j;
        }
    }
    return best;
}

std::vector<ColumnSample> extract_column(const InterferenceMap& map, double phi_f) {
    const std::size_t j = nearest_column(map, phi_f);
    std::vector<ColumnSample> column;
    column.reserve(map.grid.tau.count);
    for (std::size_t i = 0; i < map.grid.tau.count; ++i) {
        column.push_back({map.grid.tau.at(i), map.at(i, j)});
    }
    std::sort(column.begin(), column.end(),
              [](const ColumnSample& a, const ColumnSample& b) { return a.tau < b.tau; });
    return column;
}

}  // namespace lzs
