#pragma once

#include <Eigen/Dense>

namespace chainlab {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // column k belongs to values[k]
    int sweeps = 0;
    double off_norm = 0.0;    // off-diagonal Frobenius norm at exit
};

/// Cyclic Jacobi diagonalization of a dense symmetric matrix. Iterates whole
/// sweeps until the off-diagonal Frobenius norm drops below `tolerance`.
/// Throws NumericalError if that does not happen within `max_sweeps`.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tolerance = 1e-13, int max_sweeps = 60);

} // namespace chainlab
