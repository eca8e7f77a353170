#include <cmath>

#include <gtest/gtest.h>

#include "chainlab/equilibrium.hpp"
#include "chainlab/errors.hpp"
#include "chainlab/modes.hpp"
#include "test_support.hpp"

using namespace chainlab;
using namespace chainlab::testing;

namespace {

Eigen::MatrixXd weighted_hessian(const ModeSet& m) {
    const auto h = build_hessian(solve_equilibrium(m.chain));
    const auto masses = m.chain.scaled_masses();
    Eigen::MatrixXd w = h.v;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            w(i, j) /= std::sqrt(masses[static_cast<std::size_t>(i)] * masses[static_cast<std::size_t>(j)]);
    return w;
}

// Chain whose heavy ion has mass mu (in units of the light one).
ChainSpec pair_with_ratio(double mu) {
    IonSpecies heavy = mg();
    heavy.name = "Hv";
    heavy.mass_amu = 25.0 * mu;
    return ChainSpec({mg(), heavy}, default_u0());
}

} // namespace

TEST(Modes, EqualMassPairRatioIsRootThree) {
    const auto m = normal_modes(uniform_chain(mg(), 2));
    EXPECT_NEAR(m.frequencies[0], 1.0, 1e-12);
    EXPECT_NEAR(m.frequencies[1] / m.frequencies[0], std::sqrt(3.0), 1e-10);
}

TEST(Modes, AnalyticPairMatchesSolver) {
    for (double mu : {1.0, 1.5, 4.6, 10.0, 100.0}) {
        const auto m = normal_modes(pair_with_ratio(mu));
        const auto a = two_ion_analytic(mu);
        EXPECT_NEAR(m.frequencies[0], a.omega_minus, 1e-10) << mu;
        EXPECT_NEAR(m.frequencies[1], a.omega_plus, 1e-10) << mu;
        // beta' = (q_light, sqrt(mu) q_heavy).
        EXPECT_NEAR(m.beta_prime(0, 0), a.q_minus[0], 1e-10) << mu;
        EXPECT_NEAR(m.beta_prime(1, 0), std::sqrt(mu) * a.q_minus[1], 1e-10) << mu;
        EXPECT_NEAR(m.beta_prime(0, 1), a.q_plus[0], 1e-10) << mu;
        EXPECT_NEAR(m.beta_prime(1, 1), std::sqrt(mu) * a.q_plus[1], 1e-10) << mu;
    }
}

TEST(Modes, AnalyticPairClosedForm) {
    // Omega^2 = 1 + mu^-1 -/+ sqrt(1 - mu^-1 + mu^-2) for the 1:mu pair.
    const double mu = 4.6;
    const auto a = two_ion_analytic(mu);
    const double s = std::sqrt(1.0 - 1.0 / mu + 1.0 / (mu * mu));
    EXPECT_NEAR(a.omega_minus, std::sqrt(1.0 + 1.0 / mu - s), 1e-14);
    EXPECT_NEAR(a.omega_plus, std::sqrt(1.0 + 1.0 / mu + s), 1e-14);
    EXPECT_NEAR(a.omega_minus, 0.55355, 1e-5);
    EXPECT_NEAR(a.omega_plus, 1.45889, 1e-5);
    for (const auto& q : {a.q_minus, a.q_plus}) EXPECT_NEAR(q[0] * q[0] + mu * q[1] * q[1], 1.0, 1e-14);
    EXPECT_THROW(two_ion_analytic(0.5), DomainError);
}

TEST(Modes, HeavyPartnerAsymptotics) {
    const auto a = two_ion_analytic(1e4);
    EXPECT_LT(a.omega_minus, 0.02);
    EXPECT_NEAR(a.omega_plus, std::sqrt(2.0), 0.01 * std::sqrt(2.0));
}

TEST(Modes, EigenEquationAndOrthonormality) {
    for (const char* label : {"MgIn", "MgInMg", "InMgMgIn", "MgInInMgMg"}) {
        const auto m = normal_modes(chain_of(label));
        const Eigen::MatrixXd w = weighted_hessian(m);
        const auto n = static_cast<Eigen::Index>(m.size());
        Eigen::VectorXd lambda(n);
        for (Eigen::Index a = 0; a < n; ++a) lambda(a) = m.frequencies[static_cast<std::size_t>(a)] * m.frequencies[static_cast<std::size_t>(a)];
        EXPECT_LT((w * m.beta_prime - m.beta_prime * lambda.asDiagonal()).norm(), 1e-11) << label;
        EXPECT_LT((m.beta_prime.transpose() * m.beta_prime - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
        for (Eigen::Index a = 1; a < n; ++a) EXPECT_LT(m.frequencies[a - 1], m.frequencies[a]);
    }
}

TEST(Modes, SignConventionLargestEntryPositive) {
    const auto m = normal_modes(chain_of("InMgMgInMg"));
    for (Eigen::Index a = 0; a < m.beta_prime.cols(); ++a) {
        Eigen::Index idx = 0;
        m.beta_prime.col(a).cwiseAbs().maxCoeff(&idx);
        EXPECT_GT(m.beta_prime(idx, a), 0.0);
    }
}

TEST(Modes, ParityOfPalindromicChains) {
    const auto m = normal_modes(uniform_chain(mg(), 3));
    // Centre of mass (all in phase) maps onto itself: "odd" in this convention.
    EXPECT_EQ(m.parity[0], Parity::odd);
    EXPECT_EQ(m.parity[1], Parity::even);
    EXPECT_EQ(m.parity[2], Parity::odd);
    EXPECT_NEAR(m.beta_prime(1, 1), 0.0, 1e-12);
    for (auto p : normal_modes(chain_of("MgIn")).parity) EXPECT_EQ(p, Parity::none);
    EXPECT_EQ(to_string(Parity::even), "even");
}

TEST(Modes, ComModeOfEqualMasses) {
    for (int n = 2; n <= 6; ++n) {
        const auto h = build_hessian(solve_equilibrium(uniform_chain(in(), n)));
        EXPECT_LE(com_residual(h), 1e-12);
        EXPECT_NEAR(normal_modes(uniform_chain(in(), n)).frequencies[0], 1.0, 1e-12);
    }
    const auto h = build_hessian(solve_equilibrium(chain_of("MgIn")));
    EXPECT_GT(com_residual(h), 0.05);
}

TEST(Modes, HessianRowsSumToOne) {
    const auto h = build_hessian(solve_equilibrium(uniform_chain(mg(), 6)));
    for (Eigen::Index i = 0; i < h.v.rows(); ++i) EXPECT_NEAR(h.v.row(i).sum(), 1.0, 1e-12);
}

TEST(Modes, CentralMassDoesNotMoveEvenMode) {
    // The even mode leaves the centre ion at rest; compare in rad/s since m_min may change.
    auto even_frequency = [](const ModeSet& m) {
        for (std::size_t a = 0; a < m.size(); ++a)
            if (m.parity[a] == Parity::even) return m.frequency_si(a);
        return 0.0;
    };
    for (const auto& [x, y] : {std::pair{"MgMgMg", "MgInMg"}, std::pair{"InInIn", "InMgIn"}}) {
        const double a = even_frequency(normal_modes(chain_of(x)));
        const double b = even_frequency(normal_modes(chain_of(y)));
        ASSERT_GT(a, 0.0);
        EXPECT_NEAR(a / b, 1.0, 1e-10) << x << " vs " << y;
    }
}

TEST(Modes, UnstableHessianThrows) {
    Hessian h{-Eigen::MatrixXd::Identity(2, 2), chain_of("MgMg")};
    EXPECT_THROW(solve_modes(h), InstabilityError);
}

TEST(Modes, DegenerateHessianSplitByParity) {
    Hessian h{Eigen::MatrixXd::Identity(3, 3), chain_of("MgMgMg")};
    const auto m = solve_modes(h);
    EXPECT_LT((m.beta_prime.transpose() * m.beta_prime - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
    int even = 0;
    for (auto p : m.parity) even += p == Parity::even;
    EXPECT_EQ(even, 1);
}

TEST(Modes, QuantizedDisplacements) {
    const auto m = normal_modes(chain_of("MgIn"));
    const auto c = quantized_displacement_coefficients(m);
    const auto masses = m.chain.scaled_masses();
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index a = 0; a < 2; ++a) {
            const double mass = masses[static_cast<std::size_t>(i)] * m.chain.min_mass_kg();
            const double expected = m.beta_prime(i, a) * std::sqrt(PhysicalConstants::hbar / (2.0 * mass * m.frequency_si(static_cast<std::size_t>(a))));
            EXPECT_NEAR(c(i, a), expected, 1e-12 * std::abs(expected));
        }
    const std::vector<double> omegas{1e6, 2e6};
    const auto c2 = quantized_displacement_coefficients(m, omegas);
    EXPECT_NEAR(c2(0, 1) / c2(0, 0), m.beta_prime(0, 1) / m.beta_prime(0, 0) / std::sqrt(2.0), 1e-12);
    const std::vector<double> wrong{1e6};
    EXPECT_THROW(quantized_displacement_coefficients(m, wrong), DomainError);
}
