#include "chainlab/modes.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/errors.hpp"
#include "chainlab/jacobi.hpp"

namespace chainlab {

namespace {

constexpr double kParityTolerance = 1e-8;

// Largest-magnitude entry positive; near-ties go to the lowest index.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v) {
    const double max_abs = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= max_abs * (1.0 - 1e-9)) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

Eigen::MatrixXd reflection(Eigen::Index n) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) r(i, n - 1 - i) = 1.0;
    return r;
}

// Orthonormal basis of span(columns) via modified Gram-Schmidt, dropping
// columns that are numerically dependent.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& cols) {
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index k = 0; k < cols.cols(); ++k) {
        Eigen::VectorXd v = cols.col(k);
        for (const auto& b : basis) v -= b.dot(v) * b;
        for (const auto& b : basis) v -= b.dot(v) * b;
        const double norm = v.norm();
        if (norm > 1e-6) basis.push_back(v / norm);
    }
    Eigen::MatrixXd out(cols.rows(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
    return out;
}

// Inside a degenerate cluster, rotate to eigenvectors of the reflection so
// the parity labels are well defined.
void rotate_cluster_to_parity(Eigen::MatrixXd& vectors, Eigen::Index begin, Eigen::Index end) {
    const Eigen::Index n = vectors.rows();
    const Eigen::Index k = end - begin;
    const Eigen::MatrixXd block = vectors.middleCols(begin, k);
    const Eigen::MatrixXd r = reflection(n);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd odd = orthonormal_columns(0.5 * (identity + r) * block);
    const Eigen::MatrixXd even = orthonormal_columns(0.5 * (identity - r) * block);
    if (odd.cols() + even.cols() != k)
        throw NumericalError("degenerate modes could not be split by parity",
                             static_cast<double>(odd.cols() + even.cols()), static_cast<double>(k));
    vectors.middleCols(begin, odd.cols()) = odd;
    vectors.middleCols(begin + odd.cols(), even.cols()) = even;
}

} // namespace

std::string_view to_string(Parity p) {
    switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
    }
    return "none";
}

Eigen::MatrixXd ModeSet::oblique_displacements() const {
    const auto m = chain.scaled_masses();
    Eigen::MatrixXd q = beta_prime;
    for (Eigen::Index i = 0; i < q.rows(); ++i) q.row(i) /= std::sqrt(m[static_cast<std::size_t>(i)]);
    return q;
}

Hessian build_hessian(const Equilibrium& eq) {
    if (!(eq.residual < kEquilibriumTolerance))
        throw NumericalError("Hessian requested at an unconverged equilibrium", eq.residual,
                             kEquilibriumTolerance);
    return Hessian{potential_hessian(eq.positions), eq.chain};
}

ModeSet solve_modes(const Hessian& hessian) {
    const auto m = hessian.chain.scaled_masses();
    const Eigen::Index n = hessian.v.rows();
    Eigen::MatrixXd weighted(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            weighted(i, j) = hessian.v(i, j) / std::sqrt(m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)]);

    SymmetricEigen eig = jacobi_eigen(weighted, kModeEigenTolerance * std::max(1.0, weighted.norm()));

    for (Eigen::Index a = 0; a < n; ++a)
        if (!(eig.values(a) > 0.0))
            throw InstabilityError("non-positive eigenvalue of the mass-weighted Hessian", eig.values(a), 0.0);

    // Degenerate clusters: re-orthogonalize, and split by parity when possible.
    for (Eigen::Index begin = 0; begin < n;) {
        Eigen::Index end = begin + 1;
        while (end < n && std::abs(eig.values(end) - eig.values(begin)) <
                              kDegeneracyTolerance * std::max(1.0, eig.values(begin)))
            ++end;
        if (end - begin > 1) {
            eig.vectors.middleCols(begin, end - begin) = orthonormal_columns(eig.vectors.middleCols(begin, end - begin));
            if (hessian.chain.is_palindromic()) rotate_cluster_to_parity(eig.vectors, begin, end);
        }
        begin = end;
    }

    ModeSet modes{{}, eig.vectors, {}, hessian.chain};
    modes.frequencies.resize(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a) {
        modes.frequencies[static_cast<std::size_t>(a)] = std::sqrt(eig.values(a));
        apply_sign_convention(modes.beta_prime.col(a));
    }
    modes.parity = classify_parity(modes);
    return modes;
}

ModeSet normal_modes(const ChainSpec& chain) { return solve_modes(build_hessian(solve_equilibrium(chain))); }

TwoIonAnalytic two_ion_analytic(double mu) {
    if (!(mu >= 1.0)) throw DomainError("two_ion_analytic: mu must be >= 1");
    TwoIonAnalytic out;
    out.mu = mu;
    const double root = std::sqrt(1.0 + 1.0 / (mu * mu) - 1.0 / mu);
    out.omega_minus = std::sqrt(1.0 + 1.0 / mu - root);
    out.omega_plus = std::sqrt(1.0 + 1.0 / mu + root);

    const double s = std::sqrt(1.0 + mu * mu - mu);
    const double sqrt_mu = std::sqrt(mu);
    auto normalize = [&](double first) {
        Eigen::Vector2d q(first / sqrt_mu, 1.0 / sqrt_mu);
        q /= std::sqrt(q(0) * q(0) + mu * q(1) * q(1));
        Eigen::Vector2d beta(q(0), sqrt_mu * q(1));
        apply_sign_convention(beta);
        return std::array<double, 2>{beta(0), beta(1) / sqrt_mu};
    };
    out.q_minus = normalize(1.0 - mu + s);
    out.q_plus = normalize(1.0 - mu - s);
    return out;
}

std::vector<Parity> classify_parity(const ModeSet& modes) {
    const Eigen::Index n = modes.beta_prime.rows();
    const Eigen::Index count = modes.beta_prime.cols();
    if (!modes.chain.is_palindromic()) return std::vector<Parity>(static_cast<std::size_t>(count), Parity::none);

    // Masses are mirror symmetric, so the beta' pattern has the parity of q.
    std::vector<Parity> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index a = 0; a < count; ++a) {
        double sym = 0.0;
        double anti = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = modes.beta_prime(i, a);
            const double y = modes.beta_prime(n - 1 - i, a);
            sym = std::max(sym, std::abs(x - y));
            anti = std::max(anti, std::abs(x + y));
        }
        if (anti < kParityTolerance)
            out.push_back(Parity::even);
        else if (sym < kParityTolerance)
            out.push_back(Parity::odd);
        else
            throw NumericalError("mode of a palindromic chain has no definite parity",
                                 std::min(sym, anti), kParityTolerance);
    }
    return out;
}

double com_residual(const Hessian& hessian) {
    const auto m = hessian.chain.scaled_masses();
    const Eigen::Index n = hessian.v.rows();
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const Eigen::VectorXd mq = Eigen::Map<const Eigen::VectorXd>(m.data(), n).cwiseProduct(q);
    const Eigen::VectorXd vq = hessian.v * q;
    const double lambda = mq.dot(vq) / mq.dot(mq);
    return (vq - lambda * mq).norm() / mq.norm();
}

Eigen::MatrixXd quantized_displacement_coefficients(const ModeSet& modes, std::span<const double> omegas) {
    if (omegas.size() != modes.size()) throw DomainError("one frequency per mode required");
    const auto& chain = modes.chain;
    Eigen::MatrixXd c(modes.beta_prime.rows(), modes.beta_prime.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const double mass = chain.ion(static_cast<std::size_t>(i)).mass_kg();
        for (Eigen::Index a = 0; a < c.cols(); ++a) {
            const double omega = omegas[static_cast<std::size_t>(a)];
            if (!(omega > 0.0)) throw DomainError("mode frequency must be positive");
            // beta' is orthogonal, so its inverse is its transpose.
            c(i, a) = modes.beta_prime(i, a) / std::sqrt(mass) *
                      std::sqrt(PhysicalConstants::hbar / (2.0 * omega));
        }
    }
    return c;
}

Eigen::MatrixXd quantized_displacement_coefficients(const ModeSet& modes) {
    std::vector<double> omegas(modes.size());
    for (std::size_t a = 0; a < omegas.size(); ++a) omegas[a] = modes.frequency_si(a);
    return quantized_displacement_coefficients(modes, omegas);
}

} // namespace chainlab
