#pragma once

// Physical constants, species and chain configuration.
//
// Internal unit system used throughout the library ("scaled units"):
//   length     x0 = (2 k_C / u0)^(1/3)      (equilibrium spacing of two ions)
//   mass       m_min                        (lightest ion of the chain)
//   frequency  sqrt(u0 / m_min)
//   stiffness  u0
// All frequencies are angular. Conversions to Hz happen only at the CLI.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chainlab {

struct PhysicalConstants {
    /// e^2 / (4 pi eps0) in J m.
    static constexpr double coulomb = 2.307077552e-28;
    static constexpr double hbar = 1.054571817e-34;
    static constexpr double amu = 1.66053906660e-27;
    static constexpr double pi = 3.14159265358979323846;
};

struct IonSpecies {
    std::string name;
    double mass_amu = 0.0;
    double wavelength = 0.0;       // m, cooling transition
    double linewidth_gamma = 0.0;  // rad/s

    double mass_kg() const { return mass_amu * PhysicalConstants::amu; }
    /// Magnitude of the photon wavevector, 2 pi / lambda.
    double wavenumber() const { return 2.0 * PhysicalConstants::pi / wavelength; }
    /// Throws DomainError unless all fields are positive and the name is non-empty.
    void validate() const;

    friend bool operator==(const IonSpecies&, const IonSpecies&) = default;
};

/// Built-in registry: 25Mg+ (280 nm) and 115In+ (230.6 nm). Throws DomainError
/// for unknown names.
IonSpecies builtin_species(const std::string& name);
std::vector<std::string> builtin_species_names();

/// Ordered ion sequence in a harmonic axial trap of stiffness u0 (J/m^2).
class ChainSpec {
public:
    ChainSpec(std::vector<IonSpecies> sequence, double trap_u0, double k_projection = 1.0,
              std::optional<double> common_wavelength = std::nullopt);

    const std::vector<IonSpecies>& sequence() const { return sequence_; }
    const IonSpecies& ion(std::size_t i) const { return sequence_.at(i); }
    std::size_t size() const { return sequence_.size(); }
    double trap_u0() const { return u0_; }
    double k_projection() const { return k_projection_; }
    /// When set, every ion is driven at this wavelength instead of its own.
    const std::optional<double>& common_wavelength() const { return common_wavelength_; }

    double total_mass_amu() const;
    double min_mass_kg() const;
    /// max(m_i) / min(m_i).
    double mu() const;
    /// m_i / m_min.
    std::vector<double> scaled_masses() const;
    bool is_palindromic() const;
    /// Concatenated species names, e.g. "MgInMg".
    std::string label() const;
    /// Axial wavenumber seen by ion i (own or common wavelength, times k_projection).
    double axial_wavenumber(std::size_t i) const;

    double length_unit() const;     // x0 in m
    double frequency_unit() const;  // sqrt(u0/m_min) in rad/s

    ChainSpec with_sequence(std::vector<IonSpecies> sequence) const;

private:
    std::vector<IonSpecies> sequence_;
    double u0_;
    double k_projection_;
    std::optional<double> common_wavelength_;
};

struct LaserParams {
    double rabi_g = 0.0;          // rad/s (or any consistent frequency unit)
    double detuning_delta = 0.0;  // omega_L - omega_0
    double gamma = 0.0;

    bool saturation_warning() const { return rabi_g > 0.1 * gamma; }
};

/// u0 = m * omega_ref^2 for a single ion of the given species.
double u0_from_reference_frequency(const IonSpecies& species, double omega_ref);

/// x0 = (2 k_C / u0)^(1/3), in metres.
double equilibrium_length_scale(double trap_u0);
inline double equilibrium_length_scale(const ChainSpec& chain) {
    return equilibrium_length_scale(chain.trap_u0());
}

/// All 2^n sequences of two species, sorted by total mass then by the
/// lexicographic order of the species-name list.
std::vector<ChainSpec> enumerate_sequences(const IonSpecies& species_a, const IonSpecies& species_b,
                                           int n, double trap_u0);

} // namespace chainlab
