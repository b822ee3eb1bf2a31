#pragma once

// Interference maps over a (phi_f, tau) grid. Each cell is an independent
// evolve() call; cells are written to preallocated slots so the result does
// not depend on the worker count or on scheduling.

#include <cstddef>
#include <string>
#include <vector>

#include "lzs/errors.hpp"
#include "lzs/propagator.hpp"
#include "lzs/qubit_model.hpp"

namespace lzs {

/// Uniform axis: count nodes from min to max inclusive.
struct AxisRange {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 1;

    double at(std::size_t i) const;
    double step() const;  ///< 0 for a single node
};

struct GridSpec {
    AxisRange phi_f;  ///< mPhi0
    AxisRange tau;    ///< ns
    double phi_i = 0.0;

    /// Throws ValidationError on empty axes, min >= max with count > 1,
    /// non-positive tau, or a phi_f node equal to phi_i.
    void validate() const;
    std::size_t cell_count() const { return phi_f.count * tau.count; }
};

struct MapMetadata {
    QubitSpectrum spectrum = QubitSpectrum::two_level(2.0, 2.0);
    StepperConfig stepper;
    std::string timestamp;  ///< ISO-8601 UTC creation time (not serialized to CSV)
};

/// Final |L0> population per cell, stored tau-major: values[i * n_phi_f + j]
/// holds tau index i and phi_f index j.
struct InterferenceMap {
    GridSpec grid;
    std::vector<double> values;
    MapMetadata metadata;

    double at(std::size_t tau_index, std::size_t phi_f_index) const {
        return values[tau_index * grid.phi_f.count + phi_f_index];
    }
    double& at(std::size_t tau_index, std::size_t phi_f_index) {
        return values[tau_index * grid.phi_f.count + phi_f_index];
    }
};

/// Worst-case integrator invariants over a sweep.
struct SweepDiagnostics {
    double max_trace_deviation = 0.0;  ///< over every accepted step of every cell
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    double max_purity_deviation = 0.0;
    std::size_t total_steps = 0;
};

struct SweepOptions {
    int workers = 0;  ///< 0: OpenMP default
    bool collect_diagnostics = false;
};

struct SweepResult {
    InterferenceMap map;
    SweepDiagnostics diagnostics;
};

/// Thrown when a cell fails; carries the failing cell's coordinates.
class CellFailure : public IntegrationError {
public:
    CellFailure(const std::string& what, double time_reached, double phi_f, double tau)
        : IntegrationError(what, time_reached), phi_f_(phi_f), tau_(tau) {}
    double phi_f() const noexcept { return phi_f_; }
    double tau() const noexcept { return tau_; }

private:
    double phi_f_;
    double tau_;
};

/// OpenMP data-parallel sweep. Fails fast: on any cell error the remaining
/// cells are skipped and the error of the lowest-index failing cell is
/// rethrown as CellFailure.
SweepResult run_sweep(const GridSpec& grid, const QubitSpectrum& spectrum,
                      const StepperConfig& config, const SweepOptions& options = {});

/// Straightforward single-threaded loop. Reference for run_sweep.
SweepResult run_sweep_serial(const GridSpec& grid, const QubitSpectrum& spectrum,
                             const StepperConfig& config, bool collect_diagnostics = false);

/// Population of a single cell, exactly as run_sweep computes it.
double cell_population(const QubitSpectrum& spectrum, double phi_i, double phi_f, double tau,
                       const StepperConfig& config);

struct ColumnSample {
    double tau = 0.0;
    double population = 0.0;
};

/// Nearest phi_f column (ties go to the lower node), sorted by tau.
/// Throws DomainError when phi_f lies outside the grid range.
std::vector<ColumnSample> extract_column(const InterferenceMap& map, double phi_f);

/// Index of the column extract_column would select.
std::size_t nearest_column(const InterferenceMap& map, double phi_f);

}  // namespace lzs
