#include <cmath>

#include <gtest/gtest.h>

#include "chainlab/coupling.hpp"
#include "chainlab/errors.hpp"
#include "test_support.hpp"

using namespace chainlab;
using namespace chainlab::testing;

namespace {

double recoil(const IonSpecies& s) { return PhysicalConstants::hbar * s.wavenumber() * s.wavenumber() / (2.0 * s.mass_kg()); }

std::size_t even_mode(const ModeSet& m) {
    for (std::size_t a = 0; a < m.size(); ++a)
        if (m.parity[a] == Parity::even) return a;
    return m.size();
}

} // namespace

TEST(LambDicke, MatchesDefinition) {
    const auto modes = normal_modes(chain_of("MgInMg"));
    const auto ld = lamb_dicke_matrix(modes);
    ASSERT_EQ(ld.ions(), 3u);
    ASSERT_EQ(ld.mode_count(), 3u);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t a = 0; a < 3; ++a) {
            const auto& ion = modes.chain.ion(j);
            const double expected = ion.wavenumber() * modes.beta_prime(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) *
                                    std::sqrt(PhysicalConstants::hbar / (2.0 * ion.mass_kg() * modes.frequency_si(a)));
            EXPECT_NEAR(ld.eta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)), expected, 1e-14);
        }
}

TEST(LambDicke, PairRatios) {
    const auto ld = lamb_dicke_matrix(normal_modes(chain_of("MgIn")));
    const double mg_ratio = std::abs(ld.eta(0, 1) / ld.eta(0, 0));
    const double in_ratio = std::abs(ld.eta(1, 1) / ld.eta(1, 0));
    EXPECT_NEAR(mg_ratio, 2.27, 0.05 * 2.27);
    EXPECT_NEAR(in_ratio, 0.158, 0.15 * 0.158);
}

TEST(LambDicke, RegimeCheck) {
    const auto ld = lamb_dicke_matrix(normal_modes(chain_of("MgIn")));
    const std::vector<double> n{3.0, 1.0};
    const std::vector<std::size_t> mg_only{0};
    const double expected = std::max(ld.eta(0, 0) * ld.eta(0, 0) * 3.0, ld.eta(0, 1) * ld.eta(0, 1) * 1.0);
    EXPECT_DOUBLE_EQ(lamb_dicke_check(ld, n, mg_only), expected);
    const std::vector<double> wrong{1.0};
    EXPECT_THROW(lamb_dicke_check(ld, wrong, mg_only), DomainError);
}

TEST(CoolingRate, EqualMassesGiveRecoilOverFrequency) {
    for (int n = 2; n <= 6; ++n) {
        const auto modes = normal_modes(uniform_chain(mg(), n));
        std::vector<std::size_t> all(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const auto r = cooling_rate_factor(lamb_dicke_matrix(modes), all);
        for (std::size_t a = 0; a < modes.size(); ++a) {
            const double expected = recoil(mg()) / modes.frequency_si(a);
            EXPECT_NEAR(r.w[a] / expected, 1.0, 1e-12);
            EXPECT_NEAR(r.w_max[a], r.w[a], 1e-15);
        }
    }
}

TEST(CoolingRate, CentreIonDoesNotCoolEvenMode) {
    const auto modes = normal_modes(chain_of("MgInMg"));
    const std::vector<std::size_t> centre{1};
    const auto r = cooling_rate_factor(lamb_dicke_matrix(modes), centre);
    EXPECT_LT(r.w[even_mode(modes)], 1e-10 * r.w_max[even_mode(modes)]);
}

TEST(CoolingRate, RejectsEmptyOrInvalidSets) {
    const auto ld = lamb_dicke_matrix(normal_modes(chain_of("MgIn")));
    EXPECT_THROW(cooling_rate_factor(ld, std::vector<std::size_t>{}), DomainError);
    EXPECT_THROW(cooling_rate_factor(ld, std::vector<std::size_t>{2}), DomainError);
}

TEST(CoolingRate, ScanPairings) {
    const auto reports = scan_sequences_cooling(mg(), in(), 3, mg(), default_u0());
    ASSERT_EQ(reports.size(), 8u);
    auto find = [&](const std::string& label) -> const CoolingRateReport& {
        for (const auto& r : reports)
            if (r.sequence.label() == label) return r;
        throw std::runtime_error(label);
    };
    const auto& a = find("MgMgMg");
    const auto& c = find("MgInMg");
    const auto& d = find("InMgIn");
    const auto& f = find("InInIn");
    const auto ea = even_mode(normal_modes(a.sequence));
    const auto ec = even_mode(normal_modes(c.sequence));
    const auto ed = even_mode(normal_modes(d.sequence));
    EXPECT_NEAR(a.w[ea], c.w[ec], 1e-12 * a.w[ea]);
    EXPECT_NEAR(d.w[ed], f.w[1], 1e-12);
    EXPECT_EQ(f.cooling_ion_positions.size(), 0u);
    for (double w : f.w) EXPECT_EQ(w, 0.0);
    for (double w : a.w_normalized) EXPECT_NEAR(w, 1.0, 1e-12);
}

TEST(CoolingRate, ScanNormalizationSpecies) {
    CoolingScanOptions opts;
    opts.normalization_species = in();
    const auto reports = scan_sequences_cooling(mg(), in(), 2, in(), default_u0(), opts);
    for (const auto& r : reports)
        if (r.sequence.label() == "InIn")
            for (double w : r.w_normalized) EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_THROW(scan_sequences_cooling(mg(), in(), 13, mg(), default_u0()), DomainError);
    IonSpecies other = mg();
    other.name = "Ca";
    EXPECT_THROW(scan_sequences_cooling(mg(), in(), 2, other, default_u0()), DomainError);
}

TEST(FieldCoupling, EvenModesDecouple) {
    for (int n = 2; n <= 6; ++n)
        for (const auto& seq : enumerate_sequences(mg(), in(), n, default_u0())) {
            if (!seq.is_palindromic()) continue;
            const auto modes = normal_modes(seq);
            const auto f = field_coupling(modes);
            for (std::size_t a = 0; a < modes.size(); ++a)
                if (modes.parity[a] == Parity::even) EXPECT_LT(f[a], 1e-10) << seq.label() << " mode " << a;
        }
}

TEST(FieldCoupling, ComModeOfEqualMassesCarriesEverything) {
    const auto f = field_coupling(normal_modes(uniform_chain(mg(), 4)));
    EXPECT_NEAR(f[0], 2.0, 1e-12);  // sum of four entries 1/2
    for (std::size_t a = 1; a < f.size(); ++a) EXPECT_LT(f[a], 1e-10);
}

TEST(Positions, OfSpecies) {
    const auto pos = positions_of(chain_of("InMgMgIn"), "Mg");
    EXPECT_EQ(pos, (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(positions_of(chain_of("MgMg"), "In").empty());
}
