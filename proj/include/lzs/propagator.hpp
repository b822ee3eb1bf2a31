#pragma once

// Closed-system Liouville propagation of the reduced density matrix over one
// triangle pulse: d(rho)/dt = -i [H(t), rho].

#include <cstddef>
#include <optional>
#include <vector>

#include "lzs/qubit_model.hpp"

namespace lzs {

/// Density matrix in the diabatic basis (|L0>, |R0>[, |R1>]).
using DensityMatrix = ComplexMatrix;

enum class StepMethod {
    FixedRk4,        ///< classical RK4 with a constant step
    AdaptiveDopri5,  ///< Dormand-Prince 5(4) embedded pair
};

struct StepperConfig {
    StepMethod method = StepMethod::AdaptiveDopri5;
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 0.1;       ///< ns
    double initial_step = 1e-3;  ///< ns; also the RK4 step for FixedRk4
    std::size_t max_steps = 50'000'000;
    /// Keep every n-th accepted step in EvolutionResult::trajectory (0: none).
    /// The first and last states are always kept when enabled.
    std::size_t trajectory_stride = 0;

    /// Throws ValidationError on non-positive tolerances or steps.
    void validate() const;
};

struct TrajectorySample {
    double t = 0.0;
    DensityMatrix rho;
};

struct EvolutionResult {
    DensityMatrix final_state;
    std::vector<TrajectorySample> trajectory;
    std::size_t step_count = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_eval_count = 0;
    /// max |Tr rho - 1| over all accepted steps
    double max_trace_deviation = 0.0;
};

/// Pure state on |L0>. Throws DomainError unless dim is 2 or 3.
DensityMatrix initial_state(int dim);

/// -i [H, rho]. Throws DomainError on a dimension mismatch.
ComplexMatrix liouville_rhs(const HamiltonianMatrix& h, const DensityMatrix& rho);

/// Integrates from t = 0 to t = tau, always splitting at the apex t = tau/2
/// where the drive has a slope kink. Throws IntegrationError if the step
/// size underflows or max_steps is exhausted.
EvolutionResult evolve(const QubitSpectrum& spectrum, const TrianglePulse& pulse,
                       const StepperConfig& config, const DensityMatrix& rho0);

/// Convenience: evolve from initial_state(spectrum.dim()).
EvolutionResult evolve(const QubitSpectrum& spectrum, const TrianglePulse& pulse,
                       const StepperConfig& config = {});

/// Integrates under a time-independent Hamiltonian for `duration` ns.
EvolutionResult evolve_static(const HamiltonianMatrix& h, double duration,
                              const StepperConfig& config, const DensityMatrix& rho0);

// Diagnostics on a state.
double trace_deviation(const DensityMatrix& rho);
double hermiticity_error(const DensityMatrix& rho);
double min_eigenvalue(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// Population W_ii (real part of the diagonal entry).
inline double population(const DensityMatrix& rho, int i) { return rho(i, i).real(); }

}  // namespace lzs
