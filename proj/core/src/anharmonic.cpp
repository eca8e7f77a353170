#include "chainlab/anharmonic.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "chainlab/errors.hpp"

namespace chainlab {

namespace {

// Position quadrature a + a^dagger for one mode truncated at n_max.
Eigen::MatrixXd position_operator(int n_max) {
    const int d = n_max + 1;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
    for (int n = 1; n < d; ++n) {
        x(n, n - 1) = std::sqrt(static_cast<double>(n));
        x(n - 1, n) = x(n, n - 1);
    }
    return x;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double exponent_for_order(int order) { return order == 3 ? 1.5 : 2.0; }

} // namespace

double anharmonic_term(const Equilibrium& eq, int order) {
    if (eq.chain.size() != 2) throw DomainError("anharmonic expansion is implemented for two-ion chains only");
    if (order != 3 && order != 4) throw DomainError("anharmonic order must be 3 or 4");
    const double x0 = eq.chain.length_unit();
    const double sign = order % 2 == 0 ? 1.0 : -1.0;
    return sign * PhysicalConstants::coulomb / std::pow(x0, order + 1);
}

AnharmonicEstimate perturbative_shift(double x0, double light_mass_kg, double omega, int n, int order) {
    if (order != 3 && order != 4) throw DomainError("anharmonic order must be 3 or 4");
    if (!(x0 > 0.0) || !(light_mass_kg > 0.0) || !(omega > 0.0)) throw DomainError("x0, mass and omega must be positive");
    if (n < 0) throw DomainError("occupation must be non-negative");

    const double a0 = std::sqrt(PhysicalConstants::hbar / (light_mass_kg * omega));
    const double energy_scale = PhysicalConstants::coulomb / x0 * std::pow(a0 / x0, order);

    AnharmonicEstimate est;
    est.order = order;
    est.n = n;
    est.omega = omega;
    est.prefactor = energy_scale / (PhysicalConstants::hbar * omega);
    est.shift_over_hbar = energy_scale / PhysicalConstants::hbar * std::pow(static_cast<double>(n), exponent_for_order(order));
    est.tau_anh = est.shift_over_hbar > 0.0 ? 1.0 / est.shift_over_hbar : INFINITY;
    return est;
}

AnharmonicEstimate perturbative_shift(const ModeSet& modes, int n_alpha, std::size_t mode, int order) {
    if (mode >= modes.size()) throw DomainError("mode index out of range");
    return perturbative_shift(modes.chain.length_unit(), modes.chain.min_mass_kg(), modes.frequency_si(mode),
                              n_alpha, order);
}

long perturbation_validity_bound(const AnharmonicEstimate& estimate, long cap) {
    if (!(estimate.prefactor > 0.0)) return cap;
    const double n_star = std::pow(estimate.prefactor, -1.0 / exponent_for_order(estimate.order));
    if (!(n_star < static_cast<double>(cap))) return cap;
    return static_cast<long>(std::floor(n_star));
}

Eigen::MatrixXd MotionalEigenbasis::mean_occupations() const {
    const std::size_t k = truncation.modes();
    const Eigen::MatrixXd weights = vectors.cwiseAbs2();
    Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), vectors.cols());
    for (Eigen::Index b = 0; b < vectors.rows(); ++b) {
        const auto n = truncation.unflatten(static_cast<std::size_t>(b));
        for (std::size_t a = 0; a < k; ++a)
            if (n[a] != 0) occ.row(static_cast<Eigen::Index>(a)) += n[a] * weights.row(b);
    }
    return occ;
}

Eigen::MatrixXd motional_hamiltonian_matrix(double omega1, double omega2, const ModeSet& geometry,
                                            const FockTruncation& trunc, const MotionalHamiltonianOptions& options) {
    if (geometry.size() != 2) throw DomainError("motional Hamiltonian needs a two-ion geometry");
    if (trunc.modes() != 2) throw DomainError("motional Hamiltonian needs a two-mode truncation");
    if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("mode frequencies must be positive");

    const std::size_t dim = trunc.dimension();
    const double ratio = omega2 / omega1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        const auto n = trunc.unflatten(s);
        h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = n[0] + ratio * n[1];
    }
    if (!options.coupling_on || options.coupling_scale == 0.0) return h;

    const double x0 = geometry.chain.length_unit();
    const std::vector<double> omegas{omega1, omega2};
    const Eigen::MatrixXd c = quantized_displacement_coefficients(geometry, omegas);
    const double d1 = (c(1, 0) - c(0, 0)) / x0;
    const double d2 = (c(1, 1) - c(0, 1)) / x0;

    // Powers of (q2 - q1) are formed on a padded space so that every matrix
    // element between kept states is exact.
    const int pad = options.include_quartic ? 4 : 3;
    const FockTruncation ext({trunc.n_max_per_mode[0] + pad, trunc.n_max_per_mode[1] + pad});
    const Eigen::MatrixXd y = d1 * kron(position_operator(ext.n_max_per_mode[0]),
                                        Eigen::MatrixXd::Identity(ext.n_max_per_mode[1] + 1, ext.n_max_per_mode[1] + 1)) +
                              d2 * kron(Eigen::MatrixXd::Identity(ext.n_max_per_mode[0] + 1, ext.n_max_per_mode[0] + 1),
                                        position_operator(ext.n_max_per_mode[1]));
    const Eigen::MatrixXd y2 = y * y;
    const double coulomb_energy = PhysicalConstants::coulomb / x0 / (PhysicalConstants::hbar * omega1);
    // (-1)^n k_C / x0^(n+1) (q2 - q1)^n, with q in units of x0.
    Eigen::MatrixXd dv = -coulomb_energy * (y2 * y);
    if (options.include_quartic) dv += coulomb_energy * (y2 * y2);

    std::vector<Eigen::Index> kept(dim);
    for (std::size_t s = 0; s < dim; ++s) kept[s] = static_cast<Eigen::Index>(ext.flatten(trunc.unflatten(s)));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t col = 0; col < dim; ++col)
            h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) +=
                options.coupling_scale * dv(kept[r], kept[col]);
    return 0.5 * (h + h.transpose());
}

MotionalEigenbasis build_motional_hamiltonian(double omega1, double omega2, const ModeSet& geometry,
                                              const FockTruncation& trunc,
                                              const MotionalHamiltonianOptions& options) {
    const Eigen::MatrixXd h = motional_hamiltonian_matrix(omega1, omega2, geometry, trunc, options);
    const auto dim = h.rows();

    MotionalEigenbasis basis;
    basis.truncation = trunc;
    basis.coupling_on = options.coupling_on && options.coupling_scale != 0.0;
    basis.mode_frequencies = {1.0, omega2 / omega1};
    basis.frequency_unit = omega1;

    if (!basis.coupling_on) {
        // Diagonal already; sort bare states by energy (stable for ties).
        std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
        for (Eigen::Index i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return h(a, a) < h(b, b); });
        basis.energies.resize(dim);
        basis.vectors = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            basis.energies(k) = h(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
            basis.vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        if (solver.info() != Eigen::Success)
            throw NumericalError("motional Hamiltonian diagonalization failed", static_cast<double>(dim), 0.0);
        basis.energies = solver.eigenvalues();
        basis.vectors = solver.eigenvectors();
    }

    double edge = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
        const auto n = trunc.unflatten(static_cast<std::size_t>(b));
        if (n[0] == trunc.n_max_per_mode[0] || n[1] == trunc.n_max_per_mode[1])
            edge += basis.vectors(b, 0) * basis.vectors(b, 0);
    }
    if (edge > trunc.leakage_tol)
        throw NumericalError("ground state reaches the truncation edge", edge, trunc.leakage_tol);
    return basis;
}

std::vector<DegeneratePair> degeneracy_scan(std::span<const double> frequencies, int phonon_order, double tol,
                                            int n_max) {
    if (phonon_order != 3 && phonon_order != 4) throw DomainError("phonon order must be 3 or 4");
    if (frequencies.empty()) throw DomainError("degeneracy scan needs at least one mode");
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    const std::size_t k = frequencies.size();
    const double w_min = *std::min_element(frequencies.begin(), frequencies.end());

    // Phonon-number changes with |change|_1 = order, both signs present,
    // first non-zero entry positive (each unordered pair once).
    std::vector<std::vector<int>> changes;
    std::vector<int> current(k, 0);
    std::function<void(std::size_t, int)> build = [&](std::size_t a, int left) {
        if (a == k) {
            if (left != 0) return;
            bool pos = false, neg = false;
            for (int c : current) {
                pos = pos || c > 0;
                neg = neg || c < 0;
            }
            auto first = std::find_if(current.begin(), current.end(), [](int c) { return c != 0; });
            if (pos && neg && *first > 0) changes.push_back(current);
            return;
        }
        for (int c = -left; c <= left; ++c) {
            current[a] = c;
            build(a + 1, left - std::abs(c));
        }
        current[a] = 0;
    };
    build(0, phonon_order);

    const FockTruncation trunc(std::vector<int>(k, std::max(n_max, 1)));
    std::vector<DegeneratePair> out;
    for (std::size_t s = 0; s < trunc.dimension(); ++s) {
        const auto n = trunc.unflatten(s);
        if (std::any_of(n.begin(), n.end(), [&](int v) { return v > n_max; })) continue;
        for (const auto& change : changes) {
            std::vector<int> m(k);
            double gap = 0.0;
            bool inside = true;
            for (std::size_t a = 0; a < k; ++a) {
                m[a] = n[a] + change[a];
                inside = inside && m[a] >= 0 && m[a] <= n_max;
                gap += change[a] * frequencies[a];
            }
            if (!inside || std::abs(gap) / w_min >= tol) continue;
            DegeneratePair pair{n, m, gap / w_min};
            if (gap < 0.0) {
                std::swap(pair.lower, pair.upper);
                pair.gap = -pair.gap;
            }
            out.push_back(std::move(pair));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.lower, x.upper) < std::tie(y.lower, y.upper);
    });
    return out;
}

std::size_t state_count(std::span<const double> frequencies, double energy, double width) {
    if (frequencies.empty()) throw DomainError("state count needs at least one mode");
    for (double w : frequencies)
        if (!(w > 0.0)) throw DomainError("mode frequencies must be positive");
    const double upper = energy + width;
    std::size_t count = 0;
    std::function<void(std::size_t, double)> walk = [&](std::size_t a, double e) {
        if (a == frequencies.size()) {
            if (e >= energy && e < upper) ++count;
            return;
        }
        for (int n = 0; e + n * frequencies[a] < upper; ++n) walk(a + 1, e + n * frequencies[a]);
    };
    walk(0, 0.0);
    return count;
}

} // namespace chainlab
