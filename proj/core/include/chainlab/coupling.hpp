#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/modes.hpp"
#include "chainlab/physcore.hpp"

namespace chainlab {

struct LambDickeMatrix {
    Eigen::MatrixXd eta;            // rows: ions, columns: modes
    std::vector<double> per_ion_k;  // axial wavenumber, 1/m
    ModeSet modes;

    std::size_t ions() const { return static_cast<std::size_t>(eta.rows()); }
    std::size_t mode_count() const { return static_cast<std::size_t>(eta.cols()); }
};

struct CoolingRateReport {
    ChainSpec sequence;
    std::vector<std::size_t> cooling_ion_positions;
    std::vector<double> w;           // per mode, driven ions only
    std::vector<double> w_max;       // per mode, every ion driven
    std::vector<double> w_normalized;  // filled by scan_sequences_cooling
};

/// eta_j^alpha = k_j beta'_j^alpha sqrt(hbar / (2 m_j Omega_alpha)).
LambDickeMatrix lamb_dicke_matrix(const ModeSet& modes);

/// max over modes and driven ions of eta^2 n. Compare against ~0.1.
double lamb_dicke_check(const LambDickeMatrix& ld, std::span<const double> occupations,
                        std::span<const std::size_t> cooling_ions);

/// W_alpha = sum over driven ions of eta^2. Throws DomainError for an empty
/// or out-of-range cooling set.
CoolingRateReport cooling_rate_factor(const LambDickeMatrix& ld, std::span<const std::size_t> cooling_ions);

/// |sum_j beta'_j / sqrt(m_j)| per mode (masses in units of m_min): overlap
/// with a spatially uniform force.
std::vector<double> field_coupling(const ModeSet& modes);

/// Indices of ions whose species name matches.
std::vector<std::size_t> positions_of(const ChainSpec& chain, const std::string& species_name);

struct CoolingScanOptions {
    double k_projection = 1.0;
    std::optional<double> common_wavelength;
    /// Species of the homogeneous reference chain whose W^max normalizes the
    /// scan. Defaults to the lighter of the two species.
    std::optional<IonSpecies> normalization_species;
};

/// W for every two-species sequence of length n, with the cooling laser on
/// every ion of `cooling_species`. Sequences without such ions get W = 0.
/// Output order follows enumerate_sequences.
std::vector<CoolingRateReport> scan_sequences_cooling(const IonSpecies& species_a, const IonSpecies& species_b,
                                                      int n, const IonSpecies& cooling_species, double trap_u0,
                                                      const CoolingScanOptions& options = {});

} // namespace chainlab
