#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/equilibrium.hpp"
#include "chainlab/modes.hpp"
#include "chainlab/spectrum.hpp"

namespace chainlab {

/// Order-of-magnitude energy shift from the order-3 (or order-4) Coulomb
/// expansion term at occupation n:
///   order 3: (k_C/x0) (a0/x0)^3 n^{3/2},  order 4: (k_C/x0) (a0/x0)^4 n^2,
/// with a0 = sqrt(hbar / (m_light omega)).
struct AnharmonicEstimate {
    double shift_over_hbar = 0.0;  // rad/s
    double prefactor = 0.0;        // shift / (hbar omega) at n = 1
    double tau_anh = 0.0;          // hbar / |shift|, seconds
    int order = 3;
    int n = 1;
    double omega = 0.0;            // rad/s
};

/// Coefficient of (q2 - q1)^order in the two-ion potential expansion,
/// (-1)^order k_C / x0^(order+1), in J/m^order. Two-ion chains only.
double anharmonic_term(const Equilibrium& eq, int order);

AnharmonicEstimate perturbative_shift(double x0, double light_mass_kg, double omega, int n, int order = 3);

/// Uses the chain's x0, its lightest mass and the frequency of `mode`.
AnharmonicEstimate perturbative_shift(const ModeSet& modes, int n_alpha, std::size_t mode = 0, int order = 3);

/// Occupation at which the shift reaches one phonon energy, floor of
/// prefactor^(-2/order_exponent); capped at `cap`.
long perturbation_validity_bound(const AnharmonicEstimate& estimate, long cap = 1000000);

struct MotionalHamiltonianOptions {
    bool coupling_on = true;
    double coupling_scale = 1.0;
    bool include_quartic = false;
};

/// Eigenstates of the two-mode motional Hamiltonian on a truncated Fock space.
/// Energies are in units of hbar * frequency_unit.
struct MotionalEigenbasis {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd vectors;   // rows: bare states (FockTruncation order), columns: eigenstates
    FockTruncation truncation;
    bool coupling_on = false;
    std::vector<double> mode_frequencies;  // units of frequency_unit
    double frequency_unit = 1.0;           // rad/s

    std::size_t dimension() const { return static_cast<std::size_t>(energies.size()); }
    /// Mean bare occupation of every mode in each eigenstate: row alpha, column k.
    Eigen::MatrixXd mean_occupations() const;
};

/// H / (hbar omega1) = n1 + (omega2/omega1) n2 + scale * dV / (hbar omega1), with
/// dV built from the cubic (and optionally quartic) expansion term and the
/// displacement q2 - q1 expanded in the geometry's mode shapes at the
/// substituted frequencies. Matrix elements are exact inside the truncation.
Eigen::MatrixXd motional_hamiltonian_matrix(double omega1, double omega2, const ModeSet& geometry,
                                            const FockTruncation& trunc, const MotionalHamiltonianOptions& options);

/// Diagonalized motional Hamiltonian. Throws NumericalError when the lowest
/// eigenstate has more than trunc.leakage_tol weight on the truncation edge.
MotionalEigenbasis build_motional_hamiltonian(double omega1, double omega2, const ModeSet& geometry,
                                              const FockTruncation& trunc,
                                              const MotionalHamiltonianOptions& options);

struct DegeneratePair {
    std::vector<int> lower;  // bare occupations
    std::vector<int> upper;
    double gap = 0.0;        // (E_upper - E_lower) / omega_min
};

/// Pairs of bare states with all n <= n_max that differ by `phonon_order`
/// phonons (mixed creation/annihilation) and lie within tol * omega_min.
std::vector<DegeneratePair> degeneracy_scan(std::span<const double> frequencies, int phonon_order, double tol,
                                            int n_max);

/// Number of bare states with energy (above zero point) in [energy, energy + width).
std::size_t state_count(std::span<const double> frequencies, double energy, double width);

} // namespace chainlab
