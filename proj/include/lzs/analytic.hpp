#pragma once

// Closed-form Landau-Zener-Stueckelberg quantities for a triangle pulse that
// crosses an anticrossing at zero detuning twice. For an anticrossing at
// x != 0 pass pulse.relative_to(x).

#include "lzs/qubit_model.hpp"

namespace lzs {

/// l * phi_f / gap at or above this value counts as large-amplitude driving.
inline constexpr double kLargeAmplitudeRatio = 4.0;
/// phi_f >= this multiple of |phi_i| (on top of large amplitude) counts as
/// extreme-amplitude driving.
inline constexpr double kExtremeAmplitudeRatio = 8.0;

struct PhaseResult {
    double phi = 0.0;  ///< rad
    bool large_amplitude = false;
    bool extreme_amplitude = false;
};

/// Dynamical phase accumulated between the two passages of the anticrossing,
/// integrating the adiabatic gap exactly for linear branches:
///
///   phi = tau* ( sqrt(D^2 + (l F)^2) + D^2/(l F) asinh(l F / D) ),
///   tau* = F tau / (F - phi_i),  F = phi_f.
///
/// gap == 0 gives the limit l F^2 tau / (F - phi_i). Throws DomainError when
/// the anticrossing is not crossed (phi_f <= 0 or phi_i >= 0) or on invalid
/// slope/gap.
PhaseResult stueckelberg_phase(double slope, double gap, const TrianglePulse& pulse);

/// Large-amplitude limit l phi_f^2 tau / (phi_f - phi_i).
double phase_large_amplitude(double slope, const TrianglePulse& pulse);

/// Extreme-amplitude limit l phi_f tau.
double phase_extreme_amplitude(double slope, const TrianglePulse& pulse);

/// Return population of |L0>: (1 + cos phi) / 2.
double population_from_phase(double phi);

/// Diabatic passage probability exp(-c pi gap^2 / (k l)) for one sweep
/// through the anticrossing at rate k. The default c = 2 is the form used to
/// place the characteristic sweep rates; for the Hamiltonian diag(-l d, l d)
/// with coupling gap, a single linear passage follows c = 1 (see
/// kLandauZenerPassageCoefficient).
double lz_probability(double gap, double slope, double rate, double coefficient = 2.0);

/// Exponent prefactor c in exp(-c pi gap^2/(k l)) that matches a single
/// numerically integrated passage for this model's Hamiltonian convention.
inline constexpr double kLandauZenerPassageCoefficient = 1.0;

/// Sweep rate where 2 pi gap^2 / (k l) = 1.
double characteristic_sweep_rate(double gap, double slope);

/// Oscillation period in tau predicted by the large-amplitude limit.
double large_amplitude_period(double slope, const TrianglePulse& pulse);

}  // namespace lzs
