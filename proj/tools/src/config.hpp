#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainlab/errors.hpp"
#include "chainlab/physcore.hpp"

namespace chainlab::cli {

/// Bad configuration file or flag value; the message names the offending key path.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Run configuration after unit conversion. Every frequency is angular (rad/s).
struct RunConfig {
    std::vector<IonSpecies> species;  // built-ins, then user entries (which override by name)
    std::vector<std::string> sequence{"Mg", "In"};
    std::string reference_species = "Mg";
    double reference_axial_omega = 2.0 * PhysicalConstants::pi * 1.0e6;
    double k_projection = 1.0;
    std::optional<double> common_wavelength;  // m
    std::optional<double> laser_g;
    std::optional<double> laser_delta;
    std::optional<double> laser_gamma;
    nlohmann::json canonical = nlohmann::json::object();

    const IonSpecies& find_species(const std::string& name) const;
    double trap_u0() const;
    ChainSpec chain() const;
    /// Species names in order of first appearance in the chain.
    std::vector<std::string> distinct_species() const;
};

RunConfig default_config();
RunConfig parse_config(const nlohmann::json& document);
/// Reads and validates a JSON file. Throws ConfigError.
RunConfig load_config(const std::string& path);

} // namespace chainlab::cli
