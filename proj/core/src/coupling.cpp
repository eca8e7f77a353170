#include "chainlab/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/errors.hpp"

namespace chainlab {

LambDickeMatrix lamb_dicke_matrix(const ModeSet& modes) {
    const auto& chain = modes.chain;
    const auto n_ions = static_cast<Eigen::Index>(chain.size());
    const auto n_modes = static_cast<Eigen::Index>(modes.size());
    LambDickeMatrix ld{Eigen::MatrixXd(n_ions, n_modes), {}, modes};
    ld.per_ion_k.reserve(chain.size());
    for (Eigen::Index j = 0; j < n_ions; ++j) {
        const double k = chain.axial_wavenumber(static_cast<std::size_t>(j));
        const double mass = chain.ion(static_cast<std::size_t>(j)).mass_kg();
        ld.per_ion_k.push_back(k);
        for (Eigen::Index a = 0; a < n_modes; ++a) {
            const double omega = modes.frequency_si(static_cast<std::size_t>(a));
            ld.eta(j, a) = k * modes.beta_prime(j, a) * std::sqrt(PhysicalConstants::hbar / (2.0 * mass * omega));
        }
    }
    return ld;
}

double lamb_dicke_check(const LambDickeMatrix& ld, std::span<const double> occupations,
                        std::span<const std::size_t> cooling_ions) {
    if (occupations.size() != ld.mode_count()) throw DomainError("one occupation per mode required");
    double worst = 0.0;
    for (std::size_t j : cooling_ions) {
        if (j >= ld.ions()) throw DomainError("cooling ion index out of range");
        for (std::size_t a = 0; a < ld.mode_count(); ++a) {
            const double eta = ld.eta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a));
            worst = std::max(worst, eta * eta * occupations[a]);
        }
    }
    return worst;
}

CoolingRateReport cooling_rate_factor(const LambDickeMatrix& ld, std::span<const std::size_t> cooling_ions) {
    if (cooling_ions.empty()) throw DomainError("cooling set is empty: W would vanish and nothing cools");
    for (std::size_t j : cooling_ions)
        if (j >= ld.ions()) throw DomainError("cooling ion index out of range");

    CoolingRateReport report{ld.modes.chain, {cooling_ions.begin(), cooling_ions.end()}, {}, {}, {}};
    std::sort(report.cooling_ion_positions.begin(), report.cooling_ion_positions.end());
    report.cooling_ion_positions.erase(
        std::unique(report.cooling_ion_positions.begin(), report.cooling_ion_positions.end()),
        report.cooling_ion_positions.end());

    for (Eigen::Index a = 0; a < ld.eta.cols(); ++a) {
        double w = 0.0;
        for (std::size_t j : report.cooling_ion_positions) {
            const double eta = ld.eta(static_cast<Eigen::Index>(j), a);
            w += eta * eta;
        }
        report.w.push_back(w);
        report.w_max.push_back(ld.eta.col(a).squaredNorm());
    }
    return report;
}

std::vector<double> field_coupling(const ModeSet& modes) {
    const auto m = modes.chain.scaled_masses();
    std::vector<double> out;
    out.reserve(modes.size());
    for (Eigen::Index a = 0; a < modes.beta_prime.cols(); ++a) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < modes.beta_prime.rows(); ++j)
            sum += modes.beta_prime(j, a) / std::sqrt(m[static_cast<std::size_t>(j)]);
        out.push_back(std::abs(sum));
    }
    return out;
}

std::vector<std::size_t> positions_of(const ChainSpec& chain, const std::string& species_name) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < chain.size(); ++i)
        if (chain.ion(i).name == species_name) out.push_back(i);
    return out;
}

std::vector<CoolingRateReport> scan_sequences_cooling(const IonSpecies& species_a, const IonSpecies& species_b,
                                                      int n, const IonSpecies& cooling_species, double trap_u0,
                                                      const CoolingScanOptions& options) {
    if (n > 12) throw DomainError("cooling scan limited to n <= 12");
    if (cooling_species.name != species_a.name && cooling_species.name != species_b.name)
        throw DomainError("cooling species '" + cooling_species.name + "' is not part of the scan");

    const IonSpecies reference = options.normalization_species.value_or(
        species_a.mass_amu <= species_b.mass_amu ? species_a : species_b);
    const ChainSpec reference_chain(std::vector<IonSpecies>(static_cast<std::size_t>(n), reference), trap_u0,
                                    options.k_projection, options.common_wavelength);
    const auto reference_ld = lamb_dicke_matrix(normal_modes(reference_chain));
    std::vector<double> norm(reference_ld.mode_count());
    for (std::size_t a = 0; a < norm.size(); ++a)
        norm[a] = reference_ld.eta.col(static_cast<Eigen::Index>(a)).squaredNorm();

    std::vector<CoolingRateReport> out;
    for (const auto& seq : enumerate_sequences(species_a, species_b, n, trap_u0)) {
        const ChainSpec chain(seq.sequence(), trap_u0, options.k_projection, options.common_wavelength);
        const auto ld = lamb_dicke_matrix(normal_modes(chain));
        const auto cooled = positions_of(chain, cooling_species.name);
        CoolingRateReport report{chain, cooled, {}, {}, {}};
        if (cooled.empty()) {
            report.w.assign(ld.mode_count(), 0.0);
            report.w_max.resize(ld.mode_count());
            for (std::size_t a = 0; a < ld.mode_count(); ++a)
                report.w_max[a] = ld.eta.col(static_cast<Eigen::Index>(a)).squaredNorm();
        } else {
            report = cooling_rate_factor(ld, cooled);
        }
        report.w_normalized.resize(report.w.size());
        for (std::size_t a = 0; a < report.w.size(); ++a) report.w_normalized[a] = report.w[a] / norm[a];
        out.push_back(std::move(report));
    }
    return out;
}

} // namespace chainlab
