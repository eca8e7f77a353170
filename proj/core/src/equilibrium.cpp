#include "chainlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/errors.hpp"

namespace chainlab {

namespace {

constexpr int kMaxIterations = 200;

void require_increasing(std::span<const double> x) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw DomainError("ion positions must be strictly increasing (no coincident ions)");
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

} // namespace

std::vector<double> potential_gradient(std::span<const double> x) {
    require_increasing(x);
    const std::size_t n = x.size();
    // Coulomb constant is 1/2 in units of u0 x0^3.
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        double force = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = x[i] - x[j];
            force += std::copysign(0.5 / (d * d), d);
        }
        g[i] = x[i] - force;
    }
    return g;
}

Eigen::MatrixXd potential_hessian(std::span<const double> x) {
    require_increasing(x);
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = std::abs(x[i] - x[j]);
            const double c = 1.0 / (d * d * d);  // 2 k_C / d^3 with k_C = 1/2
            diag += c;
            v(i, j) = -c;
        }
        v(i, i) = diag;
    }
    return v;
}

Equilibrium solve_equilibrium(const ChainSpec& chain) {
    const std::size_t n = chain.size();
    Equilibrium eq{{}, 0.0, 0, chain};
    if (n == 1) {
        eq.positions = {0.0};
        return eq;
    }

    const double half_width = 0.48 * std::pow(static_cast<double>(n), 0.56);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n - 1);

    std::vector<double> g = potential_gradient(x);
    double residual = max_abs(g);
    int it = 0;
    while (residual >= kEquilibriumTolerance) {
        if (it == kMaxIterations)
            throw NumericalError("equilibrium Newton iteration did not converge", residual,
                                 kEquilibriumTolerance);
        ++it;
        const Eigen::MatrixXd h = potential_hessian(x);
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd step = h.ldlt().solve(rhs);

        // Step halving keeps ordering and forces the residual down.
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - scale * step(static_cast<Eigen::Index>(i));
            bool ordered = true;
            for (std::size_t i = 1; i < n; ++i) ordered = ordered && trial[i] > trial[i - 1];
            if (!ordered) continue;
            auto trial_g = potential_gradient(trial);
            const double trial_res = max_abs(trial_g);
            if (trial_res < residual || trial_res < kEquilibriumTolerance) {
                x = std::move(trial);
                g = std::move(trial_g);
                residual = trial_res;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw NumericalError("equilibrium line search stalled", residual, kEquilibriumTolerance);
        }
    }

    eq.positions = std::move(x);
    eq.residual = residual;
    eq.iterations = it;
    return eq;
}

} // namespace chainlab
