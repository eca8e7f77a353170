#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "chainlab/anharmonic.hpp"
#include "chainlab/cooling.hpp"
#include "chainlab/equilibrium.hpp"
#include "chainlab/errors.hpp"
#include "test_support.hpp"

using namespace chainlab;
using namespace chainlab::testing;

namespace {

MotionalHamiltonianOptions coupling(bool on, double scale = 1.0) {
    MotionalHamiltonianOptions o;
    o.coupling_on = on;
    o.coupling_scale = scale;
    return o;
}

} // namespace

TEST(Anharmonic, ExpansionCoefficientsMatchTaylorSeries) {
    // Coulomb energy k_C/(x0 + r): coefficient of r^n is (-1)^n k_C / x0^(n+1).
    const auto eq = solve_equilibrium(chain_of("MgIn"));
    const double x0 = eq.chain.length_unit();
    const double h = 1e-2;
    auto f = [](double r) { return 1.0 / (1.0 + r); };
    const double third = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h) / 6.0;
    const double fourth = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / (h * h * h * h) / 24.0;
    const double scale3 = PhysicalConstants::coulomb / std::pow(x0, 4);
    const double scale4 = PhysicalConstants::coulomb / std::pow(x0, 5);
    EXPECT_NEAR(anharmonic_term(eq, 3) / scale3, third, 1e-3);
    EXPECT_NEAR(anharmonic_term(eq, 4) / scale4, fourth, 1e-3);
    EXPECT_THROW(anharmonic_term(eq, 5), DomainError);
    EXPECT_THROW(anharmonic_term(solve_equilibrium(chain_of("MgMgMg")), 3), DomainError);
}

TEST(Anharmonic, PerturbativeShiftFormula) {
    const double x0 = 4.4e-6, m = 25 * PhysicalConstants::amu, w = 1e6;
    const double a0 = std::sqrt(PhysicalConstants::hbar / (m * w));
    const auto e3 = perturbative_shift(x0, m, w, 10, 3);
    const double energy = PhysicalConstants::coulomb / x0 * std::pow(a0 / x0, 3);
    EXPECT_NEAR(e3.prefactor, energy / (PhysicalConstants::hbar * w), 1e-12 * e3.prefactor);
    EXPECT_NEAR(e3.shift_over_hbar, energy / PhysicalConstants::hbar * std::pow(10.0, 1.5), 1e-9 * e3.shift_over_hbar);
    EXPECT_NEAR(e3.tau_anh, 1.0 / e3.shift_over_hbar, 1e-20);
    const auto e4 = perturbative_shift(x0, m, w, 10, 4);
    EXPECT_NEAR(e4.shift_over_hbar / e4.prefactor / w, 100.0, 1e-9);
    EXPECT_EQ(perturbation_validity_bound(e3), static_cast<long>(std::floor(std::pow(e3.prefactor, -2.0 / 3.0))));
    EXPECT_EQ(perturbation_validity_bound(e4), static_cast<long>(std::floor(std::pow(e4.prefactor, -0.5))));
    EXPECT_THROW(perturbative_shift(x0, m, w, -1, 3), DomainError);
    EXPECT_THROW(perturbative_shift(x0, m, w, 1, 2), DomainError);
}

TEST(Anharmonic, MagnitudesForMegahertzPair) {
    const auto modes = mg_in_pair_geometry(1e6);
    EXPECT_NEAR(modes.frequency_si(0), 1e6, 1e-3);
    const auto e3 = perturbative_shift(modes, 10, 0, 3);
    EXPECT_GT(e3.prefactor, 3e-3);
    EXPECT_LT(e3.prefactor, 12e-3);
    EXPECT_GT(e3.tau_anh, 2e-6);
    EXPECT_LT(e3.tau_anh, 50e-6);
    const auto e4 = perturbative_shift(modes, 10, 0, 4);
    EXPECT_GT(e4.tau_anh, 120e-6);
    EXPECT_LT(e4.tau_anh, 3000e-6);
}

TEST(MotionalHamiltonian, HarmonicLimit) {
    const auto geom = mg_in_pair_geometry(1e6);
    const FockTruncation t({5, 3});
    const auto off = motional_hamiltonian_matrix(1e6, 2e6, geom, t, coupling(false));
    for (std::size_t s = 0; s < t.dimension(); ++s) {
        const auto n = t.unflatten(s);
        EXPECT_DOUBLE_EQ(off(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)), n[0] + 2.0 * n[1]);
    }
    EXPECT_DOUBLE_EQ((off - Eigen::MatrixXd(off.diagonal().asDiagonal())).norm(), 0.0);
    const auto zero = motional_hamiltonian_matrix(1e6, 2e6, geom, t, coupling(true, 0.0));
    EXPECT_DOUBLE_EQ((off - zero).norm(), 0.0);
}

TEST(MotionalHamiltonian, CubicSelectionRulesAndElement) {
    const auto geom = mg_in_pair_geometry(1e6);
    const FockTruncation t({6, 4});
    const auto h = motional_hamiltonian_matrix(1e6, 2e6, geom, t, coupling(true));
    EXPECT_LT((h - h.transpose()).norm(), 1e-15);
    for (std::size_t r = 0; r < t.dimension(); ++r)
        for (std::size_t c = 0; c < t.dimension(); ++c) {
            if (r == c) continue;
            const auto a = t.unflatten(r), b = t.unflatten(c);
            const int change = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
            if (change % 2 == 0 || change > 3)
                EXPECT_EQ(h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 0.0);
        }
    // <1,0| -E_C Y^3 |0,0> = -E_C 3 d1 (d1^2 + d2^2).
    const std::vector<double> omegas{1e6, 2e6};
    const auto c = quantized_displacement_coefficients(geom, omegas);
    const double x0 = geom.chain.length_unit();
    const double d1 = (c(1, 0) - c(0, 0)) / x0, d2 = (c(1, 1) - c(0, 1)) / x0;
    const double ec = PhysicalConstants::coulomb / x0 / (PhysicalConstants::hbar * 1e6);
    const std::vector<int> one_zero{1, 0}, zero{0, 0};
    const auto i = static_cast<Eigen::Index>(t.flatten(one_zero));
    const auto j = static_cast<Eigen::Index>(t.flatten(zero));
    EXPECT_NEAR(h(i, j), -ec * 3 * d1 * (d1 * d1 + d2 * d2), 1e-12 * std::abs(h(i, j)));
}

TEST(MotionalHamiltonian, EigenbasisIsConsistent) {
    const auto geom = mg_in_pair_geometry(1e6);
    const FockTruncation t({12, 6}, 1e-4);
    const auto h = motional_hamiltonian_matrix(1e6, 2e6, geom, t, coupling(true));
    const auto b = build_motional_hamiltonian(1e6, 2e6, geom, t, coupling(true));
    const auto n = static_cast<Eigen::Index>(b.dimension());
    EXPECT_LT((h * b.vectors - b.vectors * b.energies.asDiagonal()).norm(), 1e-10);
    EXPECT_LT((b.vectors.transpose() * b.vectors - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
    for (Eigen::Index k = 1; k < n; ++k) EXPECT_LE(b.energies(k - 1), b.energies(k));

    const auto bare = build_motional_hamiltonian(1e6, 2e6, geom, t, coupling(false));
    const auto occ = bare.mean_occupations();
    for (Eigen::Index k = 0; k < n; ++k) {
        EXPECT_NEAR(bare.energies(k), occ(0, k) + 2.0 * occ(1, k), 1e-12);
    }
}

TEST(MotionalHamiltonian, StrongCouplingLeaksToEdge) {
    const auto geom = mg_in_pair_geometry(1e6);
    EXPECT_THROW(build_motional_hamiltonian(1e6, 2e6, geom, FockTruncation({3, 2}, 1e-6), coupling(true, 300.0)),
                 NumericalError);
}

TEST(Degeneracy, TwoToOneResonances) {
    const std::vector<double> w{1.0, 2.0};
    const auto pairs = degeneracy_scan(w, 3, 0.05, 4);
    ASSERT_FALSE(pairs.empty());
    for (const auto& p : pairs) {
        EXPECT_LT(p.gap, 0.05);
        EXPECT_EQ(std::abs(p.upper[0] - p.lower[0]) + std::abs(p.upper[1] - p.lower[1]), 3);
        EXPECT_EQ(std::abs(p.upper[0] - p.lower[0]), 2);
    }
    const std::vector<double> detuned{1.0, 2.3};
    EXPECT_TRUE(degeneracy_scan(detuned, 3, 0.05, 4).empty());
    EXPECT_THROW(degeneracy_scan(w, 2, 0.05, 4), DomainError);
}

TEST(Degeneracy, StateCount) {
    const std::vector<double> w{1.0, 2.0};
    EXPECT_EQ(state_count(w, 4.0, 1.0), 3u);  // (4,0), (2,1), (0,2)
    EXPECT_EQ(state_count(w, 0.0, 0.5), 1u);
    const std::vector<double> bad{1.0, 0.0};
    EXPECT_THROW(state_count(bad, 1.0, 1.0), DomainError);
}
