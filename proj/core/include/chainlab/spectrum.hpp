#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "chainlab/coupling.hpp"
#include "chainlab/modes.hpp"

namespace chainlab {

struct FockTruncation {
    std::vector<int> n_max_per_mode;
    double leakage_tol = 1e-6;

    FockTruncation() = default;
    FockTruncation(std::vector<int> n_max, double tol = 1e-6);

    std::size_t modes() const { return n_max_per_mode.size(); }
    /// Number of product states, prod (n_max + 1).
    std::size_t dimension() const;
    /// Row-major (last mode fastest) multi-index of a flat state index.
    std::vector<int> unflatten(std::size_t index) const;
    std::size_t flatten(std::span<const int> occupation) const;
};

/// Boltzmann distribution over the truncated product space. Energies count
/// from the zero point; frequencies and energies share one unit (hbar = 1).
struct ThermalState {
    std::vector<int> dims;
    std::vector<double> probabilities;  // flat, FockTruncation ordering
    std::vector<double> mode_frequencies;
    double mean_energy = 0.0;
    double temperature = 0.0;  // k_B T / hbar
    std::vector<double> mean_occupations;
};

struct SpectralLine {
    double delta = 0.0;
    double weight = 0.0;
};

struct StickSpectrum {
    std::vector<SpectralLine> lines;  // ascending delta

    double total_weight() const;
    /// Summed weight of lines within `tol` of `delta`.
    double weight_near(double delta, double tol) const;
    /// Lines convolved with a unit-area Lorentzian of full width `gamma`.
    double lorentzian(double delta, double gamma) const;
};

/// <n| exp(i eta (a + a^dagger)) |m> via the associated Laguerre closed form.
/// The constant phase k x_j^(0) of the kick is left out.
std::complex<double> franck_condon(double eta, int n, int m);

/// Single temperature whose truncated Boltzmann distribution has the requested
/// mean energy (bisection, 1e-9 relative). Throws NumericalError naming the
/// mode whose untruncated tail above n_max exceeds trunc.leakage_tol.
ThermalState thermal_state(std::span<const double> mode_frequencies, double mean_energy,
                           const FockTruncation& trunc);
ThermalState thermal_state(const ModeSet& modes, double mean_energy, const FockTruncation& trunc);

/// Absorption spectrum of ion j: lines at delta = E_n - E_l weighted by
/// |<n|exp(i k q_j)|l>|^2 P(l). `eta` holds eta_j^alpha for the driven ion.
StickSpectrum absorption_spectrum(std::span<const double> eta, const ThermalState& state,
                                  const FockTruncation& trunc, double grouping_tol);
StickSpectrum absorption_spectrum(const LambDickeMatrix& ld, std::size_t driven_ion, const ThermalState& state,
                                  const FockTruncation& trunc, double grouping_tol);

} // namespace chainlab
