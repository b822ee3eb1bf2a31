#include "lzs/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lzs/errors.hpp"

namespace lzs {

void StepperConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ValidationError("stepper tolerances must be positive");
    }
    if (!(max_step > 0.0) || !(initial_step > 0.0)) {
        throw ValidationError("stepper step sizes must be positive");
    }
    if (max_steps == 0) {
        throw ValidationError("stepper max_steps must be positive");
    }
}

DensityMatrix initial_state(int dim) {
    if (dim != 2 && dim != 3) {
        throw DomainError("density matrix dimension must be 2 or 3");
    }
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return rho;
}

ComplexMatrix liouville_rhs(const HamiltonianMatrix& h, const DensityMatrix& rho) {
    if (h.rows() != rho.rows() || h.cols() != rho.cols() || h.rows() != h.cols()) {
        throw DomainError("Hamiltonian and density matrix dimensions differ");
    }
    const Complex minus_i(0.0, -1.0);
    return minus_i * (h * rho - rho * h);
}

double trace_deviation(const DensityMatrix& rho) {
    return std::abs(rho.trace() - Complex(1.0, 0.0));
}

double hermiticity_error(const DensityMatrix& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DensityMatrix& rho) {
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double purity(const DensityMatrix& rho) {
    return (rho * rho).trace().real();
}

namespace {

// H(s) = diag(diag0 + diag_rate * s) + coupling over local time s of one
// linear segment of the drive.
template <int N>
struct LinearSegment {
    Eigen::Matrix<double, N, 1> diag0;
    Eigen::Matrix<double, N, 1> diag_rate;
    Eigen::Matrix<double, N, N> coupling;
    double t_offset = 0.0;  // global time at s = 0
    double length = 0.0;
};

template <int N>
using State = Eigen::Matrix<Complex, N, N>;

template <int N>
class Kernel {
public:
    Kernel(const StepperConfig& cfg, EvolutionResult& out) : cfg_(cfg), out_(out) {}

    void rhs(const LinearSegment<N>& seg, double s, const State<N>& rho, State<N>& drho) {
        ++out_.rhs_eval_count;
        Eigen::Matrix<double, N, N> h = seg.coupling;
        h.diagonal() += seg.diag0 + seg.diag_rate * s;
        const State<N> hc = h.template cast<Complex>();
        drho.noalias() = hc * rho;
        drho.noalias() -= rho * hc;
        drho *= Complex(0.0, -1.0);
    }

    void accept(double t, const State<N>& rho) {
        ++out_.step_count;
        if (out_.step_count > cfg_.max_steps) {
            std::ostringstream msg;
            msg << "step budget of " << cfg_.max_steps << " exhausted at t = " << t << " ns";
            throw IntegrationError(msg.str(), t);
        }
        out_.max_trace_deviation =
            std::max(out_.max_trace_deviation, std::abs(rho.trace() - Complex(1.0, 0.0)));
        if (cfg_.trajectory_stride > 0 && out_.step_count % cfg_.trajectory_stride == 0) {
            out_.trajectory.push_back({t, rho});
        }
    }

    void run_rk4(const LinearSegment<N>& seg, State<N>& rho) {
        const auto n = static_cast<std::size_t>(
            std::max(1.0, std::ceil(seg.length / cfg_.initial_step - 1e-9)));
        const double h = seg.length / static_cast<double>(n);
        State<N> k1, k2, k3, k4, tmp;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = h * static_cast<double>(i);
            rhs(seg, s, rho, k1);
            tmp = rho + (0.5 * h) * k1;
            rhs(seg, s + 0.5 * h, tmp, k2);
            tmp = rho + (0.5 * h) * k2;
            rhs(seg, s + 0.5 * h, tmp, k3);
            tmp = rho + h * k3;
            rhs(seg, s + h, tmp, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            accept(seg.t_offset + s + h, rho);
        }
    }

    void run_dopri5(const LinearSegment<N>& seg, State<N>& rho) {
        // Dormand-Prince 5(4) tableau.
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                         b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        // b - b_hat, the embedded error weights
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const double s_end = seg.length;
        const double h_min = 1e-14 * std::max(1.0, seg.t_offset + s_end);
        double s = 0.0;
        double h = std::min({cfg_.initial_step, cfg_.max_step, s_end});
        bool last_rejected = false;

        State<N> k1, k2, k3, k4, k5, k6, k7, tmp, next;
        rhs(seg, s, rho, k1);
        while (s < s_end) {
            if (h < h_min) {
                std::ostringstream msg;
                msg << "step size underflow (h = " << h << " ns) at t = " << seg.t_offset + s
                    << " ns";
                throw IntegrationError(msg.str(), seg.t_offset + s);
            }
            bool final_step = false;
            if (s + h >= s_end) {
                h = s_end - s;
                final_step = true;
            }

            tmp = rho + h * (a21 * k1);
            rhs(seg, s + c2 * h, tmp, k2);
            tmp = rho + h * (a31 * k1 + a32 * k2);
            rhs(seg, s + c3 * h, tmp, k3);
            tmp = rho + h * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(seg, s + c4 * h, tmp, k4);
            tmp = rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(seg, s + c5 * h, tmp, k5);
            tmp = rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(seg, s + h, tmp, k6);
            next = rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(seg, s + h, next, k7);

            const State<N> err_vec =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double sum = 0.0;
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) {
                    const double scale_re =
                        cfg_.abs_tol +
                        cfg_.rel_tol * std::max(std::abs(rho(i, j).real()), std::abs(next(i, j).real()));
                    const double scale_im =
                        cfg_.abs_tol +
                        cfg_.rel_tol * std::max(std::abs(rho(i, j).imag()), std::abs(next(i, j).imag()));
                    const double re = err_vec(i, j).real() / scale_re;
                    const double im = err_vec(i, j).imag() / scale_im;
                    sum += re * re + im * im;
                }
            }
            const double err = std::sqrt(sum / (2.0 * N * N));

            if (err <= 1.0) {
                s = final_step ? s_end : s + h;
                rho = next;
                k1 = k7;  // FSAL
                accept(seg.t_offset + s, rho);
                double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
                h = std::min(h * fac, cfg_.max_step);
                last_rejected = false;
            } else {
                ++out_.rejected_steps;
                const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
                h *= fac;
                last_rejected = true;
            }
        }
    }

    void run(const LinearSegment<N>& seg, State<N>& rho) {
        if (cfg_.method == StepMethod::FixedRk4) {
            run_rk4(seg, rho);
        } else {
            run_dopri5(seg, rho);
        }
    }

private:
    const StepperConfig& cfg_;
    EvolutionResult& out_;
};

template <int N>
Eigen::Matrix<double, N, N> coupling_of(const HamiltonianMatrix& h) {
    Eigen::Matrix<double, N, N> c = h.real();
    c.diagonal().setZero();
    return c;
}

template <int N>
EvolutionResult evolve_pulse(const QubitSpectrum& spectrum, const TrianglePulse& pulse,
                             const StepperConfig& config, const DensityMatrix& rho0) {
    EvolutionResult out;
    Kernel<N> kernel(config, out);
    State<N> rho = rho0;
    if (config.trajectory_stride > 0) {
        out.trajectory.push_back({0.0, rho0});
    }

    const double half = 0.5 * pulse.tau();
    const double k = sweep_rate(pulse);
    const Eigen::Vector3d w_start = spectrum.diabatic_energies(FluxDetuning(pulse.phi_i()));
    const Eigen::Vector3d w_apex = spectrum.diabatic_energies(FluxDetuning(pulse.phi_f()));
    // d(omega)/d(detuning) for each diabatic branch
    const Eigen::Vector3d branch_slope =
        spectrum.diabatic_energies(FluxDetuning(1.0)) - spectrum.diabatic_energies(FluxDetuning(0.0));
    const auto coupling =
        coupling_of<N>(hamiltonian_at(spectrum, FluxDetuning(pulse.phi_i())));

    LinearSegment<N> rising{w_start.head<N>(), k * branch_slope.head<N>(), coupling, 0.0, half};
    LinearSegment<N> falling{w_apex.head<N>(), -k * branch_slope.head<N>(), coupling, half,
                             pulse.tau() - half};
    kernel.run(rising, rho);
    kernel.run(falling, rho);

    out.final_state = rho;
    if (config.trajectory_stride > 0 &&
        (out.trajectory.empty() || out.trajectory.back().t != pulse.tau())) {
        out.trajectory.push_back({pulse.tau(), out.final_state});
    }
    return out;
}

template <int N>
EvolutionResult evolve_constant(const HamiltonianMatrix& h, double duration,
                                const StepperConfig& config, const DensityMatrix& rho0) {
    EvolutionResult out;
    Kernel<N> kernel(config, out);
    State<N> rho = rho0;
    LinearSegment<N> seg{h.real().diagonal(), Eigen::Matrix<double, N, 1>::Zero(),
                         coupling_of<N>(h), 0.0, duration};
    kernel.run(seg, rho);
    out.final_state = rho;
    return out;
}

}  // namespace

EvolutionResult evolve(const QubitSpectrum& spectrum, const TrianglePulse& pulse,
                       const StepperConfig& config, const DensityMatrix& rho0) {
    config.validate();
    if (rho0.rows() != spectrum.dim() || rho0.cols() != spectrum.dim()) {
        throw DomainError("initial density matrix does not match the spectrum dimension");
    }
    return spectrum.dim() == 2 ? evolve_pulse<2>(spectrum, pulse, config, rho0)
                               : evolve_pulse<3>(spectrum, pulse, config, rho0);
}

EvolutionResult evolve(const QubitSpectrum& spectrum, const TrianglePulse& pulse,
                       const StepperConfig& config) {
    return evolve(spectrum, pulse, config, initial_state(spectrum.dim()));
}

EvolutionResult evolve_static(const HamiltonianMatrix& h, double duration,
                              const StepperConfig& config, const DensityMatrix& rho0) {
    config.validate();
    if (!(duration > 0.0)) {
        throw DomainError("evolution duration must be positive");
    }
    if (h.rows() != rho0.rows() || h.rows() != h.cols() || rho0.rows() != rho0.cols()) {
        throw DomainError("Hamiltonian and density matrix dimensions differ");
    }
    if (h.imag().cwiseAbs().maxCoeff() != 0.0) {
        throw DomainError("only real Hamiltonians are supported");
    }
    switch (h.rows()) {
        case 2: return evolve_constant<2>(h, duration, config, rho0);
        case 3: return evolve_constant<3>(h, duration, config, rho0);
        default: throw DomainError("density matrix dimension must be 2 or 3");
    }
}

}  // namespace lzs
