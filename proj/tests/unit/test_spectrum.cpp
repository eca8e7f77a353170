#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "chainlab/coupling.hpp"
#include "chainlab/errors.hpp"
#include "chainlab/spectrum.hpp"
#include "test_support.hpp"

using namespace chainlab;
using namespace chainlab::testing;

namespace {

// exp(i eta (a + a^dagger)) on a large truncated ladder via eigen-decomposition.
Eigen::MatrixXcd brute_force_kick(double eta, int levels) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) x(n, n - 1) = x(n - 1, n) = std::sqrt(static_cast<double>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    Eigen::VectorXcd phase(levels);
    for (int k = 0; k < levels; ++k) phase(k) = std::polar(1.0, eta * es.eigenvalues()(k));
    const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
    return v * phase.asDiagonal() * v.adjoint();
}

} // namespace

TEST(Truncation, FlattenRoundTrip) {
    const FockTruncation t({3, 2, 4});
    EXPECT_EQ(t.dimension(), 4u * 3u * 5u);
    for (std::size_t s = 0; s < t.dimension(); ++s) EXPECT_EQ(t.flatten(t.unflatten(s)), s);
    EXPECT_EQ(t.unflatten(1), (std::vector<int>{0, 0, 1}));  // last mode fastest
    EXPECT_THROW(FockTruncation(std::vector<int>{}), DomainError);
    EXPECT_THROW(FockTruncation({0}), DomainError);
    EXPECT_THROW(FockTruncation({3}, 0.0), DomainError);
}

TEST(FranckCondon, MatchesMatrixExponential) {
    for (double eta : {0.05, 0.3, 0.6}) {
        const Eigen::MatrixXcd u = brute_force_kick(eta, 100);
        for (int n = 0; n <= 20; ++n)
            for (int m = 0; m <= 20; ++m)
                EXPECT_LT(std::abs(franck_condon(eta, n, m) - u(n, m)), 1e-10) << eta << " " << n << " " << m;
    }
}

TEST(FranckCondon, ClosedFormSpecialCases) {
    const double eta = 0.4;
    EXPECT_NEAR(std::abs(franck_condon(eta, 0, 0)), std::exp(-eta * eta / 2), 1e-15);
    EXPECT_NEAR(std::abs(franck_condon(eta, 1, 0)), eta * std::exp(-eta * eta / 2), 1e-15);
    EXPECT_NEAR(std::abs(franck_condon(eta, 1, 1)), (1 - eta * eta) * std::exp(-eta * eta / 2), 1e-15);
    EXPECT_EQ(franck_condon(0.0, 3, 3), std::complex<double>(1.0, 0.0));
    EXPECT_EQ(std::abs(franck_condon(0.0, 3, 2)), 0.0);
    EXPECT_THROW(franck_condon(0.1, -1, 0), DomainError);
}

TEST(FranckCondon, ColumnsAreNormalized) {
    for (int m : {0, 3, 10}) {
        double sum = 0.0;
        for (int n = 0; n < 120; ++n) sum += std::norm(franck_condon(0.5, n, m));
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Thermal, MeanEnergyAndNormalization) {
    const std::vector<double> w{1.0, 2.6};
    const FockTruncation t({60, 30});
    const auto s = thermal_state(w, 5.0, t);
    double sum = 0.0, energy = 0.0;
    for (std::size_t k = 0; k < s.probabilities.size(); ++k) {
        sum += s.probabilities[k];
        const auto occ = t.unflatten(k);
        energy += s.probabilities[k] * (occ[0] * w[0] + occ[1] * w[1]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(energy, 5.0, 1e-9);
    EXPECT_NEAR(s.mean_energy, 5.0, 1e-9);
    // Bose occupation at the solved temperature.
    EXPECT_NEAR(s.mean_occupations[0], 1.0 / std::expm1(w[0] / s.temperature), 1e-6);
}

TEST(Thermal, LeakageIsReported) {
    const std::vector<double> w{1.0, 2.6};
    try {
        (void)thermal_state(w, 5.0, FockTruncation({40, 20}));
        FAIL() << "expected a leakage error";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.value(), e.tolerance());
        EXPECT_NE(std::string(e.what()).find("mode 0"), std::string::npos);
    }
    EXPECT_THROW(thermal_state(w, -1.0, FockTruncation({40, 20})), DomainError);
}

TEST(Spectrum, WeightIsConserved) {
    const auto modes = normal_modes(chain_of("MgIn"));
    const FockTruncation t({60, 30});
    const auto state = thermal_state(modes, 5.0 * modes.frequencies[0], t);
    for (std::size_t ion : {0u, 1u}) {
        const auto spec = absorption_spectrum(lamb_dicke_matrix(modes), ion, state, t, 1e-9);
        EXPECT_NEAR(spec.total_weight(), 1.0, 1e-6);
        for (std::size_t k = 1; k < spec.lines.size(); ++k) EXPECT_LT(spec.lines[k - 1].delta, spec.lines[k].delta);
    }
}

TEST(Spectrum, HeavyIonSuppressesUpperSideband) {
    const auto modes = normal_modes(chain_of("MgIn"));
    const auto ld = lamb_dicke_matrix(modes);
    const FockTruncation t({12, 6});
    const auto state = thermal_state(modes, 0.02 * modes.frequencies[0], t);
    const auto spec = absorption_spectrum(ld, 1, state, t, 1e-9);
    const double lower = spec.weight_near(modes.frequencies[0], 1e-6);
    const double upper = spec.weight_near(modes.frequencies[1], 1e-6);
    const double expected = 0.158 * 0.158;
    EXPECT_NEAR(upper / lower, expected, 0.3 * expected);
}

TEST(Spectrum, SingleModeLinesFollowFranckCondon) {
    const std::vector<double> w{1.0};
    const FockTruncation t({80});
    const auto state = thermal_state(w, 0.5, t);
    const std::vector<double> eta{0.2};
    const auto spec = absorption_spectrum(eta, state, t, 1e-9);
    double carrier = 0.0;
    for (int l = 0; l <= 80; ++l) carrier += state.probabilities[static_cast<std::size_t>(l)] * std::norm(franck_condon(0.2, l, l));
    EXPECT_NEAR(spec.weight_near(0.0, 1e-6), carrier, 1e-12);
}

TEST(Spectrum, LorentzianIntegratesToTotalWeight) {
    StickSpectrum s{{{-1.0, 0.3}, {0.0, 0.5}, {2.0, 0.2}}};
    const double gamma = 0.1;
    double integral = 0.0;
    const double h = 1e-3;
    for (double d = -200.0; d <= 200.0; d += h) integral += s.lorentzian(d, gamma) * h;
    EXPECT_NEAR(integral, 1.0, 1e-3);
    EXPECT_NEAR(s.lorentzian(0.0, gamma), 0.5 * 2.0 / (PhysicalConstants::pi * gamma), 1e-2);
    EXPECT_DOUBLE_EQ(s.weight_near(-1.0, 0.01), 0.3);
}
