#include "lzs/qubit_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lzs/errors.hpp"

namespace lzs {

TrianglePulse::TrianglePulse(double phi_i, double phi_f, double tau)
    : phi_i_(phi_i), phi_f_(phi_f), tau_(tau) {
    if (!std::isfinite(phi_i) || !std::isfinite(phi_f) || !std::isfinite(tau)) {
        throw ValidationError("triangle pulse parameters must be finite");
    }
    if (!(tau > 0.0)) {
        std::ostringstream msg;
        msg << "triangle pulse width must be positive (tau = " << tau << " ns)";
        throw ValidationError(msg.str());
    }
    if (phi_f == phi_i) {
        // A flat pulse has zero sweep rate and nothing to interfere.
        throw ValidationError("degenerate triangle pulse: phi_f equals phi_i");
    }
}

TrianglePulse TrianglePulse::relative_to(double origin) const {
    return TrianglePulse(phi_i_ - origin, phi_f_ - origin, tau_);
}

double sweep_rate(const TrianglePulse& pulse) {
    return 2.0 * (pulse.phi_f() - pulse.phi_i()) / pulse.tau();
}

double triangle_signal(const TrianglePulse& pulse, double t) {
    const double tau = pulse.tau();
    if (!(t >= 0.0 && t <= tau)) {
        std::ostringstream msg;
        msg << "time " << t << " ns outside pulse window [0, " << tau << "]";
        throw DomainError(msg.str());
    }
    const double k = sweep_rate(pulse);
    return t <= 0.5 * tau ? k * t : k * (tau - t);
}

FluxDetuning detuning_at(const TrianglePulse& pulse, double t) {
    return FluxDetuning(pulse.phi_i() + triangle_signal(pulse, t));
}

double effective_width(const TrianglePulse& pulse) {
    if (pulse.phi_f() <= 0.0 || pulse.phi_i() >= 0.0) {
        throw DomainError("anticrossing not crossed: need phi_i < 0 < phi_f");
    }
    return pulse.phi_f() * pulse.tau() / (pulse.phi_f() - pulse.phi_i());
}

QubitSpectrum::QubitSpectrum(double left_slope, std::vector<Anticrossing> anticrossings)
    : left_slope_(left_slope), anticrossings_(std::move(anticrossings)) {
    if (!(left_slope_ > 0.0) || !std::isfinite(left_slope_)) {
        throw ValidationError("left branch slope must be positive and finite");
    }
    if (anticrossings_.empty() || anticrossings_.size() > 2) {
        throw ValidationError("spectrum needs one or two anticrossings");
    }
    for (std::size_t i = 0; i < anticrossings_.size(); ++i) {
        const auto& a = anticrossings_[i];
        if (!std::isfinite(a.location) || !std::isfinite(a.gap) || !std::isfinite(a.branch_slope)) {
            throw ValidationError("anticrossing parameters must be finite");
        }
        if (a.gap < 0.0) {
            throw ValidationError("anticrossing gap must be non-negative");
        }
        if (i > 0 && !(a.location > anticrossings_[i - 1].location)) {
            throw ValidationError("anticrossing locations must be strictly increasing");
        }
    }
}

QubitSpectrum QubitSpectrum::two_level(double slope, double gap) {
    return QubitSpectrum(slope, {Anticrossing{0.0, gap, slope}});
}

QubitSpectrum QubitSpectrum::three_level(double slope, double gap12, double gap13,
                                         double second_location) {
    return QubitSpectrum(slope, {Anticrossing{0.0, gap12, slope},
                                 Anticrossing{second_location, gap13, slope}});
}

Eigen::Vector3d QubitSpectrum::diabatic_energies(FluxDetuning detuning) const {
    const double d = detuning.value;
    Eigen::Vector3d w = Eigen::Vector3d::Zero();
    w[0] = -left_slope_ * d;
    for (std::size_t j = 0; j < anticrossings_.size(); ++j) {
        const auto& a = anticrossings_[j];
        w[j + 1] = a.branch_slope * (d - a.location) - left_slope_ * a.location;
    }
    return w;
}

HamiltonianMatrix hamiltonian_at(const QubitSpectrum& spectrum, FluxDetuning detuning) {
    const int n = spectrum.dim();
    const Eigen::Vector3d w = spectrum.diabatic_energies(detuning);
    HamiltonianMatrix h = HamiltonianMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = w[i];
    }
    // |L0> couples to every right-well state; right-well states do not couple.
    const auto& crossings = spectrum.anticrossings();
    for (int j = 1; j < n; ++j) {
        h(0, j) = crossings[j - 1].gap;
        h(j, 0) = crossings[j - 1].gap;
    }
    return h;
}

std::vector<double> adiabatic_levels(const QubitSpectrum& spectrum, FluxDetuning detuning) {
    const HamiltonianMatrix h = hamiltonian_at(spectrum, detuning);
    const Eigen::MatrixXd real_h = h.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(real_h, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace lzs
