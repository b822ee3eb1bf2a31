#pragma once

// Flux-qubit spectrum, triangle flux pulse and the reduced Hamiltonians
// built from them.
//
// Units: flux in milli-flux-quanta (mPhi0), time in ns, and every energy or
// frequency as an angular frequency in rad/ns (hbar = 1). Following common
// flux-qubit usage these angular values are labelled "GHz", so a slope of
// "2 GHz/mPhi0" means 2 rad/ns per mPhi0.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace lzs {

using Complex = std::complex<double>;

/// Dense complex matrix of dimension at most 3 (no heap allocation).
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using HamiltonianMatrix = ComplexMatrix;

/// Flux detuning Phi_ext - Phi0/2 in mPhi0.
struct FluxDetuning {
    double value = 0.0;

    constexpr FluxDetuning() = default;
    constexpr explicit FluxDetuning(double v) : value(v) {}
};

/// Single triangle pulse starting and ending at phi_i, peaking at phi_f
/// at t = tau/2.
class TrianglePulse {
public:
    /// Throws ValidationError unless tau > 0, all values finite and
    /// phi_f != phi_i.
    TrianglePulse(double phi_i, double phi_f, double tau);

    double phi_i() const noexcept { return phi_i_; }
    double phi_f() const noexcept { return phi_f_; }
    double tau() const noexcept { return tau_; }

    /// Same pulse expressed in detuning coordinates centred on `origin`.
    TrianglePulse relative_to(double origin) const;

private:
    double phi_i_;
    double phi_f_;
    double tau_;
};

/// Sweep rate k = 2 (phi_f - phi_i) / tau, mPhi0/ns.
double sweep_rate(const TrianglePulse& pulse);

/// Triangle offset added to phi_i: k t on the rising half, k (tau - t) on
/// the falling half. Throws DomainError outside [0, tau].
double triangle_signal(const TrianglePulse& pulse, double t);

/// phi_i + triangle_signal(t).
FluxDetuning detuning_at(const TrianglePulse& pulse, double t);

/// Time between the two passages through an anticrossing at zero
/// detuning. Requires phi_i < 0 < phi_f, otherwise DomainError.
double effective_width(const TrianglePulse& pulse);

struct Anticrossing {
    double location = 0.0;      ///< mPhi0
    double gap = 0.0;           ///< coupling to |L0>, rad/ns
    double branch_slope = 0.0;  ///< slope of the right-well branch, rad/ns per mPhi0
};

/// Linear diabatic branches with one (|L0>,|R0>) or two (|L0>,|R0>,|R1>)
/// anticrossings against the left-well ground state.
///
/// The left branch is omega_1 = -l * d. A right-well branch with slope s and
/// crossing location x is omega_j = s (d - x) - l x, so omega_j(x) = omega_1(x).
class QubitSpectrum {
public:
    /// Throws ValidationError on l <= 0, negative gaps, a list size other
    /// than 1 or 2, or locations that are not strictly increasing.
    QubitSpectrum(double left_slope, std::vector<Anticrossing> anticrossings);

    /// Two-level system with the anticrossing pinned at zero detuning.
    static QubitSpectrum two_level(double slope, double gap);

    /// Three-level system: |R0> crosses at 0, |R1> at `second_location`.
    static QubitSpectrum three_level(double slope, double gap12, double gap13,
                                     double second_location = 8.0);

    double left_slope() const noexcept { return left_slope_; }
    const std::vector<Anticrossing>& anticrossings() const noexcept { return anticrossings_; }
    int dim() const noexcept { return static_cast<int>(anticrossings_.size()) + 1; }

    /// Diagonal (diabatic) energies at a detuning, in basis order.
    Eigen::Vector3d diabatic_energies(FluxDetuning detuning) const;

private:
    double left_slope_;
    std::vector<Anticrossing> anticrossings_;
};

HamiltonianMatrix hamiltonian_at(const QubitSpectrum& spectrum, FluxDetuning detuning);

/// Instantaneous eigenvalues, ascending.
std::vector<double> adiabatic_levels(const QubitSpectrum& spectrum, FluxDetuning detuning);

}  // namespace lzs
