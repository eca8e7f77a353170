#include "chainlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "chainlab/errors.hpp"

namespace chainlab {

namespace {

double generalized_laguerre(int k, double alpha, double x) {
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

std::complex<double> i_power(int k) {
    switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

// Per-mode truncated Boltzmann weights for temperature t (unnormalized
// ratios x^n) and the resulting mean occupation.
struct ModeThermal {
    std::vector<double> p;
    double mean = 0.0;
};

ModeThermal mode_thermal(double omega, double t, int n_max) {
    ModeThermal m;
    m.p.resize(static_cast<std::size_t>(n_max) + 1);
    const double x = std::exp(-omega / t);
    double w = 1.0;
    double z = 0.0;
    double first = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        m.p[static_cast<std::size_t>(n)] = w;
        z += w;
        first += n * w;
        w *= x;
    }
    for (double& v : m.p) v /= z;
    m.mean = first / z;
    return m;
}

double truncated_energy(std::span<const double> omegas, double t, const FockTruncation& trunc) {
    double e = 0.0;
    for (std::size_t a = 0; a < omegas.size(); ++a)
        e += omegas[a] * mode_thermal(omegas[a], t, trunc.n_max_per_mode[a]).mean;
    return e;
}

} // namespace

FockTruncation::FockTruncation(std::vector<int> n_max, double tol)
    : n_max_per_mode(std::move(n_max)), leakage_tol(tol) {
    if (n_max_per_mode.empty()) throw DomainError("truncation needs at least one mode");
    for (int n : n_max_per_mode)
        if (n < 1) throw DomainError("every n_max must be >= 1");
    if (!(leakage_tol > 0.0)) throw DomainError("leakage tolerance must be positive");
}

std::size_t FockTruncation::dimension() const {
    std::size_t d = 1;
    for (int n : n_max_per_mode) d *= static_cast<std::size_t>(n + 1);
    return d;
}

std::vector<int> FockTruncation::unflatten(std::size_t index) const {
    std::vector<int> occ(n_max_per_mode.size());
    for (std::size_t a = occ.size(); a-- > 0;) {
        const auto base = static_cast<std::size_t>(n_max_per_mode[a] + 1);
        occ[a] = static_cast<int>(index % base);
        index /= base;
    }
    return occ;
}

std::size_t FockTruncation::flatten(std::span<const int> occupation) const {
    std::size_t index = 0;
    for (std::size_t a = 0; a < n_max_per_mode.size(); ++a)
        index = index * static_cast<std::size_t>(n_max_per_mode[a] + 1) + static_cast<std::size_t>(occupation[a]);
    return index;
}

double StickSpectrum::total_weight() const {
    double total = 0.0;
    for (const auto& l : lines) total += l.weight;
    return total;
}

double StickSpectrum::weight_near(double delta, double tol) const {
    double total = 0.0;
    for (const auto& l : lines)
        if (std::abs(l.delta - delta) <= tol) total += l.weight;
    return total;
}

double StickSpectrum::lorentzian(double delta, double gamma) const {
    const double half = 0.5 * gamma;
    double total = 0.0;
    for (const auto& l : lines) {
        const double x = delta - l.delta;
        total += l.weight * half / (PhysicalConstants::pi * (x * x + half * half));
    }
    return total;
}

std::complex<double> franck_condon(double eta, int n, int m) {
    if (n < 0 || m < 0) throw DomainError("Fock indices must be non-negative");
    const int lo = std::min(n, m);
    const int d = std::abs(n - m);
    // sqrt(lo! / hi!) * eta^d, accumulated term by term.
    double amplitude = 1.0;
    for (int k = lo + 1; k <= lo + d; ++k) amplitude *= eta / std::sqrt(static_cast<double>(k));
    const double x = eta * eta;
    return std::exp(-0.5 * x) * amplitude * generalized_laguerre(lo, d, x) * i_power(d);
}

ThermalState thermal_state(std::span<const double> omegas, double mean_energy, const FockTruncation& trunc) {
    if (omegas.size() != trunc.modes()) throw DomainError("truncation must list one n_max per mode");
    if (!(mean_energy > 0.0)) throw DomainError("mean energy must be positive");
    for (double w : omegas)
        if (!(w > 0.0)) throw DomainError("mode frequencies must be positive");

    const double w_min = *std::min_element(omegas.begin(), omegas.end());
    const double w_max = *std::max_element(omegas.begin(), omegas.end());

    double lo = w_min * 1e-3;
    double hi = w_max * 1e6;
    while (truncated_energy(omegas, lo, trunc) > mean_energy && lo > 1e-300) lo *= 1e-3;
    if (truncated_energy(omegas, hi, trunc) < mean_energy)
        throw NumericalError("mean energy cannot be held by the truncation", mean_energy,
                             truncated_energy(omegas, hi, trunc));

    double t = std::sqrt(lo * hi);
    for (int it = 0; it < 400; ++it) {
        t = std::sqrt(lo * hi);
        const double e = truncated_energy(omegas, t, trunc);
        if (std::abs(e - mean_energy) <= 1e-12 * mean_energy) break;
        (e < mean_energy ? lo : hi) = t;
        if (hi / lo - 1.0 < 1e-15) break;
    }

    ThermalState state;
    state.mode_frequencies.assign(omegas.begin(), omegas.end());
    state.dims.reserve(omegas.size());
    state.temperature = t;
    std::vector<ModeThermal> per_mode;
    for (std::size_t a = 0; a < omegas.size(); ++a) {
        const int n_max = trunc.n_max_per_mode[a];
        const double tail = std::exp(-omegas[a] / t * (n_max + 1));
        if (tail > trunc.leakage_tol)
            throw NumericalError("thermal occupation of mode " + std::to_string(a) + " leaks past n_max = " +
                                     std::to_string(n_max),
                                 tail, trunc.leakage_tol);
        per_mode.push_back(mode_thermal(omegas[a], t, n_max));
        state.dims.push_back(n_max + 1);
        state.mean_occupations.push_back(per_mode.back().mean);
    }

    const std::size_t dim = trunc.dimension();
    state.probabilities.resize(dim);
    double energy = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const auto occ = trunc.unflatten(s);
        double p = 1.0;
        double e = 0.0;
        for (std::size_t a = 0; a < occ.size(); ++a) {
            p *= per_mode[a].p[static_cast<std::size_t>(occ[a])];
            e += omegas[a] * occ[a];
        }
        state.probabilities[s] = p;
        energy += p * e;
    }
    state.mean_energy = energy;
    return state;
}

ThermalState thermal_state(const ModeSet& modes, double mean_energy, const FockTruncation& trunc) {
    return thermal_state(modes.frequencies, mean_energy, trunc);
}

StickSpectrum absorption_spectrum(std::span<const double> eta, const ThermalState& state,
                                  const FockTruncation& trunc, double grouping_tol) {
    const std::size_t k = trunc.modes();
    if (eta.size() != k || state.dims.size() != k) throw DomainError("eta, state and truncation disagree on mode count");
    for (std::size_t a = 0; a < k; ++a)
        if (state.dims[a] != trunc.n_max_per_mode[a] + 1) throw DomainError("state was built on another truncation");

    // |<n|D_alpha|l>|^2 per mode, and the weight each initial level loses
    // above the truncation.
    std::vector<std::vector<double>> table(k);
    std::vector<std::vector<double>> lost(k);
    for (std::size_t a = 0; a < k; ++a) {
        const int d = trunc.n_max_per_mode[a] + 1;
        table[a].resize(static_cast<std::size_t>(d * d));
        lost[a].resize(static_cast<std::size_t>(d));
        for (int l = 0; l < d; ++l) {
            double kept = 0.0;
            for (int n = 0; n < d; ++n) {
                const double w = std::norm(franck_condon(eta[a], n, l));
                table[a][static_cast<std::size_t>(n * d + l)] = w;
                kept += w;
            }
            lost[a][static_cast<std::size_t>(l)] = std::max(0.0, 1.0 - kept);
        }
    }

    // Accumulate by phonon-number change; offset_a = Delta_a + n_max_a.
    std::vector<int> span(k);
    std::size_t buckets = 1;
    for (std::size_t a = 0; a < k; ++a) {
        span[a] = 2 * trunc.n_max_per_mode[a] + 1;
        buckets *= static_cast<std::size_t>(span[a]);
    }
    std::vector<double> by_change(buckets, 0.0);

    const std::size_t dim = trunc.dimension();
    std::vector<std::vector<int>> occupations(dim);
    for (std::size_t s = 0; s < dim; ++s) occupations[s] = trunc.unflatten(s);

    double leak = 0.0;
    for (std::size_t l = 0; l < dim; ++l) {
        const double p = state.probabilities[l];
        if (p == 0.0) continue;
        const auto& occ_l = occupations[l];
        double kept = 1.0;
        for (std::size_t a = 0; a < k; ++a) kept *= 1.0 - lost[a][static_cast<std::size_t>(occ_l[a])];
        leak += p * (1.0 - kept);
        for (std::size_t n = 0; n < dim; ++n) {
            const auto& occ_n = occupations[n];
            double w = p;
            std::size_t bucket = 0;
            for (std::size_t a = 0; a < k; ++a) {
                const int d = trunc.n_max_per_mode[a] + 1;
                w *= table[a][static_cast<std::size_t>(occ_n[a] * d + occ_l[a])];
                bucket = bucket * static_cast<std::size_t>(span[a]) +
                         static_cast<std::size_t>(occ_n[a] - occ_l[a] + trunc.n_max_per_mode[a]);
            }
            by_change[bucket] += w;
        }
    }
    if (leak > trunc.leakage_tol)
        throw NumericalError("absorption spectrum loses weight above the truncation", leak, trunc.leakage_tol);

    std::vector<SpectralLine> raw;
    for (std::size_t b = 0; b < buckets; ++b) {
        if (by_change[b] == 0.0) continue;
        std::size_t rest = b;
        double delta = 0.0;
        for (std::size_t a = k; a-- > 0;) {
            const int change = static_cast<int>(rest % static_cast<std::size_t>(span[a])) - trunc.n_max_per_mode[a];
            rest /= static_cast<std::size_t>(span[a]);
            delta += change * state.mode_frequencies[a];
        }
        raw.push_back({delta, by_change[b]});
    }
    std::stable_sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) { return x.delta < y.delta; });

    StickSpectrum out;
    for (const auto& line : raw) {
        if (!out.lines.empty() && line.delta - out.lines.back().delta <= grouping_tol) {
            auto& last = out.lines.back();
            const double w = last.weight + line.weight;
            last.delta = (last.delta * last.weight + line.delta * line.weight) / w;
            last.weight = w;
        } else {
            out.lines.push_back(line);
        }
    }
    return out;
}

StickSpectrum absorption_spectrum(const LambDickeMatrix& ld, std::size_t driven_ion, const ThermalState& state,
                                  const FockTruncation& trunc, double grouping_tol) {
    if (driven_ion >= ld.ions()) throw DomainError("driven ion index out of range");
    std::vector<double> eta(ld.mode_count());
    for (std::size_t a = 0; a < eta.size(); ++a)
        eta[a] = ld.eta(static_cast<Eigen::Index>(driven_ion), static_cast<Eigen::Index>(a));
    return absorption_spectrum(eta, state, trunc, grouping_tol);
}

} // namespace chainlab
