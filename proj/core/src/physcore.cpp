#include "chainlab/physcore.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/errors.hpp"

namespace chainlab {

namespace {

constexpr double kTwoPi = 2.0 * PhysicalConstants::pi;

} // namespace

void IonSpecies::validate() const {
    if (name.empty()) throw DomainError("ion species needs a name");
    if (!(mass_amu > 0.0)) throw DomainError("species '" + name + "': mass_amu must be positive");
    if (!(wavelength > 0.0)) throw DomainError("species '" + name + "': wavelength must be positive");
    if (!(linewidth_gamma > 0.0))
        throw DomainError("species '" + name + "': linewidth must be positive");
}

IonSpecies builtin_species(const std::string& name) {
    if (name == "Mg") return {"Mg", 25.0, 280.0e-9, kTwoPi * 41.8e6};
    if (name == "In") return {"In", 115.0, 230.6e-9, kTwoPi * 0.36e6};
    throw DomainError("unknown built-in species '" + name + "'");
}

std::vector<std::string> builtin_species_names() { return {"Mg", "In"}; }

ChainSpec::ChainSpec(std::vector<IonSpecies> sequence, double trap_u0, double k_projection,
                     std::optional<double> common_wavelength)
    : sequence_(std::move(sequence)), u0_(trap_u0), k_projection_(k_projection),
      common_wavelength_(common_wavelength) {
    if (sequence_.empty()) throw DomainError("chain needs at least one ion");
    if (!(u0_ > 0.0)) throw DomainError("trap_u0 must be positive");
    if (!(k_projection_ >= -1.0 && k_projection_ <= 1.0))
        throw DomainError("k_projection must lie in [-1, 1]");
    if (common_wavelength_ && !(*common_wavelength_ > 0.0))
        throw DomainError("common wavelength must be positive");
    for (const auto& s : sequence_) s.validate();
}

double ChainSpec::total_mass_amu() const {
    double total = 0.0;
    for (const auto& s : sequence_) total += s.mass_amu;
    return total;
}

double ChainSpec::min_mass_kg() const {
    auto it = std::min_element(sequence_.begin(), sequence_.end(),
                               [](const auto& a, const auto& b) { return a.mass_amu < b.mass_amu; });
    return it->mass_kg();
}

double ChainSpec::mu() const {
    auto [lo, hi] = std::minmax_element(
        sequence_.begin(), sequence_.end(),
        [](const auto& a, const auto& b) { return a.mass_amu < b.mass_amu; });
    return hi->mass_amu / lo->mass_amu;
}

std::vector<double> ChainSpec::scaled_masses() const {
    const double m_min = min_mass_kg() / PhysicalConstants::amu;
    std::vector<double> out;
    out.reserve(sequence_.size());
    for (const auto& s : sequence_) out.push_back(s.mass_amu / m_min);
    return out;
}

bool ChainSpec::is_palindromic() const {
    const std::size_t n = sequence_.size();
    for (std::size_t i = 0; i < n / 2; ++i)
        if (sequence_[i].name != sequence_[n - 1 - i].name) return false;
    return true;
}

std::string ChainSpec::label() const {
    std::string out;
    for (const auto& s : sequence_) out += s.name;
    return out;
}

double ChainSpec::axial_wavenumber(std::size_t i) const {
    const double lambda = common_wavelength_ ? *common_wavelength_ : ion(i).wavelength;
    return kTwoPi / lambda * k_projection_;
}

double ChainSpec::length_unit() const { return equilibrium_length_scale(u0_); }

double ChainSpec::frequency_unit() const { return std::sqrt(u0_ / min_mass_kg()); }

ChainSpec ChainSpec::with_sequence(std::vector<IonSpecies> sequence) const {
    return ChainSpec(std::move(sequence), u0_, k_projection_, common_wavelength_);
}

double u0_from_reference_frequency(const IonSpecies& species, double omega_ref) {
    if (!(omega_ref > 0.0)) throw DomainError("reference frequency must be positive");
    return species.mass_kg() * omega_ref * omega_ref;
}

double equilibrium_length_scale(double trap_u0) {
    if (!(trap_u0 > 0.0)) throw DomainError("trap_u0 must be positive");
    return std::cbrt(2.0 * PhysicalConstants::coulomb / trap_u0);
}

std::vector<ChainSpec> enumerate_sequences(const IonSpecies& species_a, const IonSpecies& species_b,
                                           int n, double trap_u0) {
    if (n < 1) throw DomainError("sequence length must be at least 1");
    if (n > 20) throw DomainError("sequence length above enumeration bound 20");

    struct Entry {
        double mass;
        std::vector<std::string> names;
        std::vector<IonSpecies> ions;
    };
    std::vector<Entry> entries;
    entries.reserve(std::size_t{1} << n);
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
        Entry e{0.0, {}, {}};
        for (int i = 0; i < n; ++i) {
            const IonSpecies& s = (bits >> (n - 1 - i)) & 1u ? species_b : species_a;
            e.mass += s.mass_amu;
            e.names.push_back(s.name);
            e.ions.push_back(s);
        }
        entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.mass != y.mass) return x.mass < y.mass;
        return x.names < y.names;
    });

    std::vector<ChainSpec> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.emplace_back(std::move(e.ions), trap_u0);
    return out;
}

} // namespace chainlab
