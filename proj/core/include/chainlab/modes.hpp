#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/equilibrium.hpp"
#include "chainlab/physcore.hpp"

namespace chainlab {

/// Hessian of the potential at equilibrium, in units of u0.
struct Hessian {
    Eigen::MatrixXd v;
    ChainSpec chain;
};

/// Behaviour of a mode's displacement pattern under reflection about the trap
/// centre. `even` means q_i = -q_{N-1-i}; `none` for non-palindromic chains.
enum class Parity { even, odd, none };

std::string_view to_string(Parity p);

struct ModeSet {
    std::vector<double> frequencies;  // ascending, units of sqrt(u0/m_min)
    Eigen::MatrixXd beta_prime;       // column alpha: mass-weighted eigenvector
    std::vector<Parity> parity;
    ChainSpec chain;

    std::size_t size() const { return frequencies.size(); }
    /// Angular frequency of mode alpha in rad/s.
    double frequency_si(std::size_t alpha) const { return frequencies.at(alpha) * chain.frequency_unit(); }
    /// Oblique displacement q_i = beta'_i / sqrt(m_i), masses in units of m_min.
    Eigen::MatrixXd oblique_displacements() const;
};

struct TwoIonAnalytic {
    double mu = 1.0;
    double omega_minus = 0.0;  // units of sqrt(u0/m), m the lighter mass
    double omega_plus = 0.0;
    /// Component 0 is the light ion, component 1 the heavy one. Normalized so
    /// that q(0)^2 + mu q(1)^2 = 1; sign chosen like ModeSet::beta_prime.
    std::array<double, 2> q_minus{};
    std::array<double, 2> q_plus{};
};

/// Relative tolerance below which two eigenvalues count as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kModeEigenTolerance = 1e-13;

/// Builds V_ij from the equilibrium positions. Rows sum to one (in units of u0).
Hessian build_hessian(const Equilibrium& eq);

/// Diagonalizes V_ij / sqrt(m_i m_j) by cyclic Jacobi. Frequencies ascend; in
/// every column the entry of largest magnitude is positive. Throws
/// InstabilityError on a non-positive eigenvalue.
ModeSet solve_modes(const Hessian& hessian);

/// Equilibrium, Hessian and modes in one call.
ModeSet normal_modes(const ChainSpec& chain);

TwoIonAnalytic two_ion_analytic(double mu);

/// Parity labels for the modes; throws NumericalError when a palindromic chain
/// yields a mode that is neither even nor odd to 1e-8.
std::vector<Parity> classify_parity(const ModeSet& modes);

/// min over lambda of |V q - lambda M q| / |M q| for q the uniform
/// (centre-of-mass) displacement; zero iff all masses are equal.
double com_residual(const Hessian& hessian);

/// c_{i alpha} in metres such that q_i = sum_alpha c_{i alpha} (a_alpha + a_alpha^dagger).
Eigen::MatrixXd quantized_displacement_coefficients(const ModeSet& modes);

/// Same, with the mode frequencies (rad/s) replaced by `omegas` while keeping
/// the mode shapes.
Eigen::MatrixXd quantized_displacement_coefficients(const ModeSet& modes, std::span<const double> omegas);

} // namespace chainlab
