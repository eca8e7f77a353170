#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/anharmonic.hpp"
#include "chainlab/modes.hpp"
#include "chainlab/physcore.hpp"
#include "chainlab/spectrum.hpp"

namespace chainlab {

/// Heating (A+) and cooling (A-) coefficients for a laser on the first red
/// sideband of a mode of frequency omega, transition linewidth gamma.
struct SidebandCoefficients {
    double a_plus = 0.0;
    double a_minus = 0.0;

    /// A+ / (A- - A+), the mean occupation of the geometric steady state.
    double steady_state_occupation() const { return a_plus / (a_minus - a_plus); }
};

SidebandCoefficients sideband_coefficients(double omega, double gamma);

/// Populations over motional states (a single mode's Fock ladder, or motional
/// eigenstates). Time is measured in tau = gamma / g^2. sum(p) = 1 - leakage.
struct RateState {
    std::vector<double> p;
    double time = 0.0;
    double leakage = 0.0;

    double total() const;
    /// sum n p(n) / sum p(n) for a Fock-ladder state.
    double mean_n() const;
};

/// Geometric distribution with the given mean on levels 0..n_max; the tail
/// above n_max is booked as leakage.
RateState thermal_rate_state(double mean_n, int n_max);

struct RateTrajectory {
    std::vector<double> times;  // tau
    std::vector<double> mean_n;
    std::vector<double> leakage;
    RateState final_state;
};

inline constexpr double kMaxLeakage = 1e-4;

/// Integrates the Lamb-Dicke rate equation for one mode,
///   dP(n)/dt = W [ (n+1) A- P(n+1) - ((n+1) A+ + n A-) P(n) + n A+ P(n-1) ],
/// in units of tau = gamma/g^2, sampling every `sample_interval`. Population
/// pushed above the top level is booked as leakage; more than 1e-4 throws.
RateTrajectory ld_rate_evolve(double mode_omega, double w_alpha, const LaserParams& laser, const RateState& initial,
                              double t_final, double sample_interval = 1.0);

/// Scattering rates between motional eigenstates in the low-saturation limit:
///   R(m -> n) = (g^2 gamma / 4) sum_c w(c) |sum_v <n|e^{-i c X}|v><v|e^{i X}|m> /
///                                         (delta - (E_v - E_m) + i gamma/2)|^2
/// with X = sum_alpha eta_alpha (a_alpha + a_alpha^dagger) for the driven ion,
/// w(c) = (3/8)(1 + c^2) the dipole emission pattern on Gauss-Legendre nodes.
/// Laser parameters share the energy unit of the basis. Entry (n, m) holds
/// R(m -> n); the diagonal is zero.
Eigen::MatrixXd scattering_rate_kernel(const MotionalEigenbasis& basis, std::span<const double> eta,
                                       const LaserParams& laser, int quadrature_nodes = 8);

/// Rates expressed per tau = gamma / g^2.
Eigen::MatrixXd kernel_in_tau_units(const Eigen::MatrixXd& kernel, const LaserParams& laser);

struct EigenbasisTrajectory {
    std::vector<double> times;                   // tau
    std::vector<std::vector<double>> mean_n;     // [sample][mode], bare occupation numbers
    std::vector<double> leakage;
    RateState final_state;                       // eigenstate populations
    std::vector<double> final_bare_distribution; // FockTruncation ordering
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Populations-only projection of a bare-basis distribution onto eigenstates.
RateState project_to_eigenbasis(const MotionalEigenbasis& basis, std::span<const double> bare_probabilities,
                                double leakage = 0.0);

/// Product of per-mode geometric distributions, truncated but not renormalized.
/// Returns the bare-basis probabilities; the discarded tail goes to `leakage`.
std::vector<double> thermal_product_distribution(const FockTruncation& trunc, std::span<const double> mean_n,
                                                 double& leakage);

/// Evolves dP/dt = M P with M(n, m) = R(m -> n) and M(m, m) = -sum_n R(m -> n)
/// (classical RK4, dt <= 0.1 / max |M(m, m)|). A step that would push any
/// population below -1e-9 is retried with half the step.
EigenbasisTrajectory eigenbasis_rate_evolve(const Eigen::MatrixXd& kernel_per_tau, const MotionalEigenbasis& basis,
                                            const RateState& initial, double t_final, double sample_interval = 1.0);

/// Two modes at (omega, ratio * omega) sharing the geometry of a two-ion
/// chain, sideband-cooled on the lower mode through one ion.
struct DegenerateCoolingConfig {
    double omega = 1.0e6;  // rad/s; sets the physical anharmonic coupling
    double omega_ratio = 2.0;
    std::vector<double> eta{0.1, 0.1 / 1.4142135623730951};
    double gamma = 0.1;     // units of omega
    double detuning = -1.0;
    double rabi_g = 0.01;
    double t_final = 150.0; // tau
    double sample_interval = 1.0;
    FockTruncation truncation{{25, 14}, kMaxLeakage};
    std::vector<double> initial_mean{2.0, 1.0};
    MotionalHamiltonianOptions hamiltonian{};
};

struct DegenerateCoolingResult {
    MotionalEigenbasis basis;
    EigenbasisTrajectory trajectory;
};

/// 25Mg+ / 115In+ pair whose lower mode sits at omega (rad/s).
ModeSet mg_in_pair_geometry(double omega);

DegenerateCoolingResult simulate_degenerate_cooling(const DegenerateCoolingConfig& config);
DegenerateCoolingResult simulate_degenerate_cooling(const DegenerateCoolingConfig& config, const ModeSet& geometry);

/// First time at which values drop to values[0] / e (linear interpolation);
/// +infinity if they never do.
double one_over_e_time(std::span<const double> times, std::span<const double> values);

} // namespace chainlab
