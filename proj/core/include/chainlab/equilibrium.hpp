#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/physcore.hpp"

namespace chainlab {

/// Classical equilibrium of the chain, positions in units of x0, ascending.
struct Equilibrium {
    std::vector<double> positions;
    double residual = 0.0;  // max |dV/dx_i| in units of u0 x0
    int iterations = 0;
    ChainSpec chain;
};

inline constexpr double kEquilibriumTolerance = 1e-12;

/// Solves dV/dx_i = 0 by damped Newton iteration. The result does not depend
/// on the ionic masses. Throws NumericalError after 200 iterations.
Equilibrium solve_equilibrium(const ChainSpec& chain);

/// Gradient of the trap + Coulomb potential in units of u0 x0, positions in x0.
/// In these units the potential reads V = sum x_i^2 / 2 + (1/4) sum_{i != j} 1/|x_i - x_j|.
/// Throws DomainError unless positions are strictly increasing.
std::vector<double> potential_gradient(std::span<const double> positions);

/// Hessian of the same potential in units of u0 (the Newton Jacobian).
Eigen::MatrixXd potential_hessian(std::span<const double> positions);

} // namespace chainlab
