#include "lzs/analytic.hpp"

#include <cmath>
#include <numbers>

#include "lzs/errors.hpp"

namespace lzs {

namespace {

void require_crossing(const TrianglePulse& pulse) {
    if (pulse.phi_f() <= 0.0 || pulse.phi_i() >= 0.0) {
        throw DomainError("anticrossing not crossed: need phi_i < 0 < phi_f");
    }
}

}  // namespace

PhaseResult stueckelberg_phase(double slope, double gap, const TrianglePulse& pulse) {
    if (!(slope > 0.0)) {
        throw DomainError("spectrum slope must be positive");
    }
    if (!(gap >= 0.0)) {
        throw DomainError("gap must be non-negative");
    }
    const double tau_star = effective_width(pulse);
    const double apex = slope * pulse.phi_f();

    PhaseResult result;
    if (gap == 0.0) {
        result.phi = tau_star * apex;
        result.large_amplitude = true;
    } else {
        const double ratio = apex / gap;
        result.phi = tau_star * (std::hypot(gap, apex) + gap * gap / apex * std::asinh(ratio));
        result.large_amplitude = ratio >= kLargeAmplitudeRatio;
    }
    result.extreme_amplitude = result.large_amplitude &&
                               pulse.phi_f() >= kExtremeAmplitudeRatio * std::abs(pulse.phi_i());
    return result;
}

double phase_large_amplitude(double slope, const TrianglePulse& pulse) {
    const double f = pulse.phi_f();
    return slope * f * f * pulse.tau() / (f - pulse.phi_i());
}

double phase_extreme_amplitude(double slope, const TrianglePulse& pulse) {
    return slope * pulse.phi_f() * pulse.tau();
}

double population_from_phase(double phi) {
    return 0.5 * (1.0 + std::cos(phi));
}

double lz_probability(double gap, double slope, double rate, double coefficient) {
    if (!(rate > 0.0) || !(slope > 0.0)) {
        throw DomainError("Landau-Zener probability needs positive rate and slope");
    }
    return std::exp(-coefficient * std::numbers::pi * gap * gap / (rate * slope));
}

double characteristic_sweep_rate(double gap, double slope) {
    if (!(gap > 0.0) || !(slope > 0.0)) {
        throw DomainError("characteristic sweep rate needs positive gap and slope");
    }
    return 2.0 * std::numbers::pi * gap * gap / slope;
}

double large_amplitude_period(double slope, const TrianglePulse& pulse) {
    require_crossing(pulse);
    const double f = pulse.phi_f();
    return 2.0 * std::numbers::pi * (f - pulse.phi_i()) / (slope * f * f);
}

}  // namespace lzs
