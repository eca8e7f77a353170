#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace chainlab::cli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * PhysicalConstants::pi;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("config: " + (path.empty() ? "/" : path) + " must be an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError("config: unknown key " + child(path, item.key()));
    }
}

const json& required(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError("config: missing key " + child(path, key));
    return j.at(key);
}

double positive_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0)) throw ConfigError("config: " + path + " must be positive");
    return x;
}

double finite_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
    return v.get<double>();
}

std::string string_value(const json& v, const std::string& path) {
    if (!v.is_string() || v.get<std::string>().empty())
        throw ConfigError("config: " + path + " must be a non-empty string");
    return v.get<std::string>();
}

void parse_species(const json& list, RunConfig& cfg) {
    if (!list.is_array()) throw ConfigError("config: /species must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "/species/" + std::to_string(i);
        const json& s = list[i];
        require_object(s, path);
        check_keys(s, path, {"name", "mass_amu", "wavelength_nm", "gamma_hz"});
        IonSpecies sp;
        sp.name = string_value(required(s, path, "name"), child(path, "name"));
        sp.mass_amu = positive_number(required(s, path, "mass_amu"), child(path, "mass_amu"));
        sp.wavelength = positive_number(required(s, path, "wavelength_nm"), child(path, "wavelength_nm")) * 1e-9;
        sp.linewidth_gamma = kTwoPi * positive_number(required(s, path, "gamma_hz"), child(path, "gamma_hz"));
        auto existing = std::find_if(cfg.species.begin(), cfg.species.end(),
                                     [&](const IonSpecies& o) { return o.name == sp.name; });
        if (existing != cfg.species.end())
            *existing = sp;
        else
            cfg.species.push_back(sp);
    }
}

void parse_chain(const json& c, RunConfig& cfg) {
    require_object(c, "/chain");
    check_keys(c, "/chain", {"sequence", "reference", "k_projection", "common_wavelength_nm"});
    if (c.contains("sequence")) {
        const json& seq = c.at("sequence");
        if (!seq.is_array() || seq.empty()) throw ConfigError("config: /chain/sequence must be a non-empty array");
        cfg.sequence.clear();
        for (std::size_t i = 0; i < seq.size(); ++i)
            cfg.sequence.push_back(string_value(seq[i], "/chain/sequence/" + std::to_string(i)));
    }
    if (c.contains("reference")) {
        const json& r = c.at("reference");
        require_object(r, "/chain/reference");
        check_keys(r, "/chain/reference", {"species", "axial_freq_hz"});
        cfg.reference_species = string_value(required(r, "/chain/reference", "species"), "/chain/reference/species");
        cfg.reference_axial_omega =
            kTwoPi * positive_number(required(r, "/chain/reference", "axial_freq_hz"), "/chain/reference/axial_freq_hz");
    }
    if (c.contains("k_projection")) cfg.k_projection = positive_number(c.at("k_projection"), "/chain/k_projection");
    if (c.contains("common_wavelength_nm"))
        cfg.common_wavelength = positive_number(c.at("common_wavelength_nm"), "/chain/common_wavelength_nm") * 1e-9;
}

void parse_laser(const json& l, RunConfig& cfg) {
    require_object(l, "/laser");
    check_keys(l, "/laser", {"g_hz", "delta_hz", "gamma_hz"});
    if (l.contains("g_hz")) cfg.laser_g = kTwoPi * positive_number(l.at("g_hz"), "/laser/g_hz");
    if (l.contains("delta_hz")) cfg.laser_delta = kTwoPi * finite_number(l.at("delta_hz"), "/laser/delta_hz");
    if (l.contains("gamma_hz")) cfg.laser_gamma = kTwoPi * positive_number(l.at("gamma_hz"), "/laser/gamma_hz");
}

} // namespace

const IonSpecies& RunConfig::find_species(const std::string& name) const {
    for (const auto& s : species)
        if (s.name == name) return s;
    throw ConfigError("config: unknown species '" + name + "'");
}

double RunConfig::trap_u0() const { return u0_from_reference_frequency(find_species(reference_species), reference_axial_omega); }

ChainSpec RunConfig::chain() const {
    std::vector<IonSpecies> ions;
    for (const auto& name : sequence) ions.push_back(find_species(name));
    return ChainSpec(std::move(ions), trap_u0(), k_projection, common_wavelength);
}

std::vector<std::string> RunConfig::distinct_species() const {
    std::vector<std::string> out;
    for (const auto& name : sequence)
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

RunConfig default_config() {
    RunConfig cfg;
    for (const auto& name : builtin_species_names()) cfg.species.push_back(builtin_species(name));
    return cfg;
}

RunConfig parse_config(const json& document) {
    RunConfig cfg = default_config();
    require_object(document, "");
    check_keys(document, "", {"species", "chain", "laser"});
    if (document.contains("species")) parse_species(document.at("species"), cfg);
    if (document.contains("chain")) parse_chain(document.at("chain"), cfg);
    if (document.contains("laser")) parse_laser(document.at("laser"), cfg);
    for (std::size_t i = 0; i < cfg.sequence.size(); ++i) {
        try {
            (void)cfg.find_species(cfg.sequence[i]);
        } catch (const ConfigError&) {
            throw ConfigError("config: /chain/sequence/" + std::to_string(i) + " names unknown species '" +
                              cfg.sequence[i] + "'");
        }
    }
    try {
        (void)cfg.find_species(cfg.reference_species);
    } catch (const ConfigError&) {
        throw ConfigError("config: /chain/reference/species names unknown species '" + cfg.reference_species + "'");
    }
    cfg.canonical = document;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    json document;
    try {
        document = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(document);
}

} // namespace chainlab::cli
