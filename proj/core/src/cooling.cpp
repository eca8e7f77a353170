#include "chainlab/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>

#include "chainlab/errors.hpp"

namespace chainlab {

namespace {

using Derivative = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

void rk4_step(const Derivative& f, Eigen::VectorXd& y, double dt) {
    Eigen::VectorXd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
    f(y, k1);
    f(y + 0.5 * dt * k1, k2);
    f(y + 0.5 * dt * k2, k3);
    f(y + dt * k3, k4);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void clip_small_negatives(Eigen::Ref<Eigen::VectorXd> p) {
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) < 0.0 && p(i) >= -1e-12) p(i) = 0.0;
}

// Sample instants 0, h, 2h, ..., t_final (the last one exact).
std::vector<double> sample_times(double t_final, double interval) {
    std::vector<double> out{0.0};
    if (t_final <= 0.0) return out;
    const auto count = static_cast<long>(std::floor(t_final / interval + 1e-9));
    for (long k = 1; k <= count; ++k) out.push_back(std::min(t_final, static_cast<double>(k) * interval));
    if (t_final - out.back() > 1e-12 * std::max(1.0, t_final)) out.push_back(t_final);
    return out;
}

} // namespace

SidebandCoefficients sideband_coefficients(double omega, double gamma) {
    if (!(omega > 0.0) || !(gamma > 0.0)) throw DomainError("omega and gamma must be positive");
    const double r2 = (omega / gamma) * (omega / gamma);
    const double emission = 0.4 / (4.0 * r2 + 1.0);
    return {1.0 / (16.0 * r2 + 1.0) + emission, 1.0 + emission};
}

double RateState::total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

double RateState::mean_n() const {
    double first = 0.0;
    double zero = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        first += static_cast<double>(n) * p[n];
        zero += p[n];
    }
    return first / zero;
}

RateState thermal_rate_state(double mean_n, int n_max) {
    if (!(mean_n >= 0.0)) throw DomainError("mean occupation must be non-negative");
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    RateState s;
    s.p.resize(static_cast<std::size_t>(n_max) + 1);
    const double x = mean_n / (mean_n + 1.0);
    double w = 1.0 - x;
    double kept = 0.0;
    for (auto& v : s.p) {
        v = w;
        kept += w;
        w *= x;
    }
    s.leakage = std::max(0.0, 1.0 - kept);
    return s;
}

RateTrajectory ld_rate_evolve(double mode_omega, double w_alpha, const LaserParams& laser, const RateState& initial,
                              double t_final, double sample_interval) {
    if (!(t_final >= 0.0)) throw DomainError("t_final must be non-negative");
    if (!(w_alpha > 0.0)) throw DomainError("W_alpha must be positive; a mode with W = 0 is not cooled");
    if (!(sample_interval > 0.0)) throw DomainError("sample interval must be positive");
    if (initial.p.size() < 2) throw DomainError("rate state needs at least two levels");
    if (std::abs(initial.total() + initial.leakage - 1.0) > 1e-9)
        throw DomainError("initial distribution is not normalized");

    const auto coeff = sideband_coefficients(mode_omega, laser.gamma);
    const auto levels = static_cast<Eigen::Index>(initial.p.size());
    const Eigen::Index top = levels - 1;
    const double ap = coeff.a_plus;
    const double am = coeff.a_minus;

    // Last component carries the leaked population.
    const Derivative f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        for (Eigen::Index n = 0; n <= top; ++n) {
            const double nn = static_cast<double>(n);
            double v = -((nn + 1.0) * ap + nn * am) * y(n);
            if (n < top) v += (nn + 1.0) * am * y(n + 1);
            if (n > 0) v += nn * ap * y(n - 1);
            dy(n) = w_alpha * v;
        }
        dy(levels) = w_alpha * (static_cast<double>(top) + 1.0) * ap * y(top);
    };

    Eigen::VectorXd y(levels + 1);
    for (Eigen::Index n = 0; n < levels; ++n) y(n) = initial.p[static_cast<std::size_t>(n)];
    y(levels) = initial.leakage;

    const double max_rate = w_alpha * ((static_cast<double>(top) + 1.0) * (ap + am));
    const double dt_max = 0.1 / max_rate;

    RateTrajectory traj;
    auto record = [&](double t) {
        RateState s;
        s.p.assign(y.data(), y.data() + levels);
        s.time = initial.time + t;
        s.leakage = y(levels);
        if (s.leakage > kMaxLeakage)
            throw NumericalError("rate equation leaks above the truncation", s.leakage, kMaxLeakage);
        traj.times.push_back(s.time);
        traj.mean_n.push_back(s.mean_n());
        traj.leakage.push_back(s.leakage);
        traj.final_state = std::move(s);
    };

    const auto samples = sample_times(t_final, sample_interval);
    record(0.0);
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const double span = samples[k] - samples[k - 1];
        const auto steps = static_cast<long>(std::ceil(span / dt_max - 1e-12));
        const double dt = span / static_cast<double>(std::max(steps, 1L));
        for (long s = 0; s < std::max(steps, 1L); ++s) rk4_step(f, y, dt);
        clip_small_negatives(y.head(levels));
        record(samples[k]);
    }
    return traj;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw DomainError("quadrature needs at least one node");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(PhysicalConstants::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

Eigen::MatrixXd scattering_rate_kernel(const MotionalEigenbasis& basis, std::span<const double> eta,
                                       const LaserParams& laser, int quadrature_nodes) {
    const auto& trunc = basis.truncation;
    if (eta.size() != trunc.modes()) throw DomainError("one Lamb-Dicke parameter per mode required");
    if (!(laser.gamma > 0.0)) throw DomainError("linewidth must be positive");
    const auto dim = static_cast<Eigen::Index>(trunc.dimension());
    if (basis.vectors.rows() != dim || basis.vectors.cols() != dim)
        throw NumericalError("eigenbasis does not match its truncation", static_cast<double>(basis.vectors.cols()),
                             static_cast<double>(dim));

    // X = sum_alpha eta_alpha (a + a^dagger) on the truncated product space.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto occ = trunc.unflatten(static_cast<std::size_t>(s));
        for (std::size_t a = 0; a < occ.size(); ++a) {
            if (occ[a] == trunc.n_max_per_mode[a]) continue;
            auto up = occ;
            ++up[a];
            const auto t = static_cast<Eigen::Index>(trunc.flatten(up));
            const double element = eta[a] * std::sqrt(static_cast<double>(up[a]));
            x(t, s) += element;
            x(s, t) += element;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> xs(x);
    if (xs.info() != Eigen::Success) throw NumericalError("kick operator diagonalization failed", 0.0, 0.0);
    // Kick operators in the motional eigenbasis: K(s) = W^T diag(exp(i s x)) W.
    const Eigen::MatrixXd w = xs.eigenvectors().transpose() * basis.vectors;
    const Eigen::VectorXd& xvals = xs.eigenvalues();
    auto kick = [&](double s) {
        Eigen::MatrixXcd phased(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const std::complex<double> ph = std::polar(1.0, s * xvals(i));
            phased.row(i) = ph * w.row(i).cast<std::complex<double>>();
        }
        return Eigen::MatrixXcd(w.transpose().cast<std::complex<double>>() * phased);
    };

    std::vector<double> nodes, gl_weights;
    gauss_legendre(quadrature_nodes, nodes, gl_weights);
    std::vector<Eigen::MatrixXcd> emission;
    std::vector<double> pattern;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        emission.push_back(kick(-nodes[q]));
        pattern.push_back(gl_weights[q] * 0.375 * (1.0 + nodes[q] * nodes[q]));
    }
    const Eigen::MatrixXcd absorption = kick(1.0);

    const double prefactor = 0.25 * laser.rabi_g * laser.rabi_g * laser.gamma;
    const std::complex<double> half_width(0.0, 0.5 * laser.gamma);
    Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXcd amplitude(dim);
    for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index v = 0; v < dim; ++v)
            amplitude(v) = absorption(v, m) /
                           (laser.detuning_delta - (basis.energies(v) - basis.energies(m)) + half_width);
        for (std::size_t q = 0; q < emission.size(); ++q)
            rates.col(m) += prefactor * pattern[q] * (emission[q] * amplitude).cwiseAbs2();
        rates(m, m) = 0.0;
    }
    return rates;
}

Eigen::MatrixXd kernel_in_tau_units(const Eigen::MatrixXd& kernel, const LaserParams& laser) {
    if (!(laser.rabi_g > 0.0)) throw DomainError("Rabi frequency must be positive");
    return kernel * (laser.gamma / (laser.rabi_g * laser.rabi_g));
}

RateState project_to_eigenbasis(const MotionalEigenbasis& basis, std::span<const double> bare, double leakage) {
    if (bare.size() != basis.dimension()) throw DomainError("bare distribution has the wrong dimension");
    const Eigen::Map<const Eigen::VectorXd> p(bare.data(), static_cast<Eigen::Index>(bare.size()));
    const Eigen::VectorXd eig = basis.vectors.cwiseAbs2().transpose() * p;
    RateState s;
    s.p.assign(eig.data(), eig.data() + eig.size());
    s.leakage = leakage;
    return s;
}

std::vector<double> thermal_product_distribution(const FockTruncation& trunc, std::span<const double> mean_n,
                                                 double& leakage) {
    if (mean_n.size() != trunc.modes()) throw DomainError("one mean occupation per mode required");
    std::vector<RateState> per_mode;
    for (std::size_t a = 0; a < mean_n.size(); ++a)
        per_mode.push_back(thermal_rate_state(mean_n[a], trunc.n_max_per_mode[a]));
    std::vector<double> out(trunc.dimension());
    double kept = 0.0;
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto occ = trunc.unflatten(s);
        double p = 1.0;
        for (std::size_t a = 0; a < occ.size(); ++a) p *= per_mode[a].p[static_cast<std::size_t>(occ[a])];
        out[s] = p;
        kept += p;
    }
    leakage = std::max(0.0, 1.0 - kept);
    return out;
}

EigenbasisTrajectory eigenbasis_rate_evolve(const Eigen::MatrixXd& kernel, const MotionalEigenbasis& basis,
                                            const RateState& initial, double t_final, double sample_interval) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    if (kernel.rows() != dim || kernel.cols() != dim || static_cast<Eigen::Index>(initial.p.size()) != dim)
        throw DomainError("kernel, basis and state dimensions disagree");
    if (!(t_final >= 0.0)) throw DomainError("t_final must be non-negative");
    if (!(sample_interval > 0.0)) throw DomainError("sample interval must be positive");

    Eigen::MatrixXd generator = kernel;
    generator.diagonal().setZero();
    const Eigen::VectorXd outflow = generator.colwise().sum();
    generator.diagonal() = -outflow;
    const double max_rate = outflow.maxCoeff();
    const double dt_max = max_rate > 0.0 ? 0.1 / max_rate : sample_interval;

    const Eigen::MatrixXd occupation = basis.mean_occupations();
    const Eigen::MatrixXd weights = basis.vectors.cwiseAbs2();
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(initial.p.data(), dim);

    EigenbasisTrajectory traj;
    auto record = [&](double t) {
        const double norm = p.sum();
        const Eigen::VectorXd n = occupation * p / norm;
        traj.times.push_back(initial.time + t);
        traj.mean_n.emplace_back(n.data(), n.data() + n.size());
        traj.leakage.push_back(initial.leakage + std::max(0.0, initial.total() - norm));
    };
    const Derivative f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy.noalias() = generator * y; };

    const auto samples = sample_times(t_final, sample_interval);
    record(0.0);
    for (std::size_t k = 1; k < samples.size(); ++k) {
        double t = samples[k - 1];
        double dt = std::min(dt_max, samples[k] - t);
        while (t < samples[k] - 1e-12 * std::max(1.0, samples[k])) {
            dt = std::min(dt, samples[k] - t);
            Eigen::VectorXd trial = p;
            rk4_step(f, trial, dt);
            if (trial.minCoeff() < -1e-9) {
                dt *= 0.5;
                if (dt < 1e-12 * dt_max)
                    throw NumericalError("rate integration cannot keep populations non-negative", trial.minCoeff(),
                                         -1e-9);
                continue;
            }
            clip_small_negatives(trial);
            p = std::move(trial);
            t += dt;
            dt = std::min(dt_max, 2.0 * dt);
        }
        record(samples[k]);
    }

    traj.final_state.p.assign(p.data(), p.data() + dim);
    traj.final_state.time = initial.time + t_final;
    traj.final_state.leakage = traj.leakage.back();
    const Eigen::VectorXd bare = weights * p;
    traj.final_bare_distribution.assign(bare.data(), bare.data() + bare.size());
    return traj;
}

ModeSet mg_in_pair_geometry(double omega) {
    const IonSpecies mg = builtin_species("Mg");
    const IonSpecies in = builtin_species("In");
    // Lower mode frequency of the pair in units of sqrt(u0/m_Mg).
    const double lower = two_ion_analytic(in.mass_amu / mg.mass_amu).omega_minus;
    const double u0 = mg.mass_kg() * (omega / lower) * (omega / lower);
    return normal_modes(ChainSpec({mg, in}, u0));
}

DegenerateCoolingResult simulate_degenerate_cooling(const DegenerateCoolingConfig& config) {
    return simulate_degenerate_cooling(config, mg_in_pair_geometry(config.omega));
}

DegenerateCoolingResult simulate_degenerate_cooling(const DegenerateCoolingConfig& config, const ModeSet& geometry) {
    if (config.eta.size() != 2 || config.initial_mean.size() != 2) throw DomainError("two modes expected");
    DegenerateCoolingResult result{
        build_motional_hamiltonian(config.omega, config.omega_ratio * config.omega, geometry, config.truncation,
                                   config.hamiltonian),
        {}};
    const LaserParams laser{config.rabi_g, config.detuning, config.gamma};
    const Eigen::MatrixXd kernel = kernel_in_tau_units(scattering_rate_kernel(result.basis, config.eta, laser), laser);

    double leakage = 0.0;
    const auto bare = thermal_product_distribution(config.truncation, config.initial_mean, leakage);
    if (leakage > kMaxLeakage)
        throw NumericalError("initial thermal state does not fit the truncation", leakage, kMaxLeakage);
    const RateState initial = project_to_eigenbasis(result.basis, bare, leakage);
    result.trajectory = eigenbasis_rate_evolve(kernel, result.basis, initial, config.t_final, config.sample_interval);
    return result;
}

double one_over_e_time(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size() || times.empty()) throw DomainError("times and values must match");
    const double target = values[0] / std::exp(1.0);
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] <= target) {
            const double f = (values[k - 1] - target) / (values[k - 1] - values[k]);
            return times[k - 1] + f * (times[k] - times[k - 1]);
        }
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace chainlab
