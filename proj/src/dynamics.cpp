#include "latnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "latnls/fft.hpp"

namespace latnls {

namespace {

using Cx = std::complex<double>;

double sup_abs(const std::vector<Cx>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

// Exact pointwise flow of i u_t = lambda |u|^2 u over a step theta.
void nonlinear_phase(std::vector<Cx>& u, double lambda, double theta) {
    for (auto& z : u) z *= std::polar(1.0, -lambda * std::norm(z) * theta);
}

// One splitting step; `phase_full` is the precomputed linear multiplier for
// the full step dt.
void advance(std::vector<Cx>& u, const std::vector<Cx>& phase_full, double lambda, double dt,
             const EvolutionConfig& cfg) {
    const bool strang = cfg.scheme == Scheme::Strang;
    if (cfg.nonlinear_term) nonlinear_phase(u, lambda, strang ? dt / 2.0 : dt);
    if (cfg.linear_term) {
        auto spec = fft_forward(u);
        for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= phase_full[j];
        u = fft_inverse(spec);
    }
    if (cfg.nonlinear_term && strang) nonlinear_phase(u, lambda, dt / 2.0);
}

void check_state(const std::vector<Cx>& u, double linf0, double factor, double t,
                 const char* who) {
    const double linf = sup_abs(u);
    if (!std::isfinite(linf) || linf > factor * linf0) {
        std::ostringstream msg;
        msg << who << ": blow-up guard tripped at t = " << t << " (|u|_inf = " << linf
            << ", initial = " << linf0 << ", factor = " << factor << ")";
        throw std::runtime_error(msg.str());
    }
}

std::size_t step_count(const EvolutionConfig& cfg) {
    const double ratio = cfg.t_final / std::abs(cfg.dt);
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    return n == 0 ? 1 : n;
}

}  // namespace

void EvolutionConfig::validate() const {
    if (!(std::abs(dt) > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("EvolutionConfig: dt must be nonzero and finite");
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("EvolutionConfig: t_final must be positive");
    if (std::abs(dt) > t_final)
        throw std::invalid_argument("EvolutionConfig: |dt| must not exceed t_final");
    if (t_final / std::abs(dt) > 1e8)
        throw std::invalid_argument("EvolutionConfig: more than 1e8 steps requested");
    if (record_every == 0)
        throw std::invalid_argument("EvolutionConfig: record_every must be positive");
    if (!(blowup_factor > 0.0))
        throw std::invalid_argument("EvolutionConfig: blowup_factor must be positive");
    for (double s : norm_sigmas) {
        if (!(s >= 0.0) || !(s <= 1.0))
            throw std::invalid_argument("EvolutionConfig: recorded sigma must lie in [0, 1]");
    }
}

Trajectory evolve_discrete(const LatticeField& datum, const Kernel& kernel,
                           const EvolutionConfig& config) {
    config.validate();
    if (!(kernel.class_s > 0.5))
        throw std::invalid_argument("evolve_discrete: kernel class must exceed 1/2");

    const PeriodicLattice& lat = datum.lattice;
    const double b = beta(kernel, lat.h);
    const auto symbol = lattice_symbol(kernel, lat.n_sites);
    const std::size_t N = lat.n_sites;
    const double lambda = config.sign == Sign::Defocusing ? 1.0 : -1.0;

    std::vector<Cx> phase(N);
    for (std::size_t j = 0; j < N; ++j) phase[j] = std::polar(1.0, -config.dt * symbol[j] / b);

    Trajectory traj;
    for (double s : config.norm_sigmas) traj.norm_series.push_back({s, {}});

    auto record = [&](std::size_t k, const std::vector<Cx>& u) {
        LatticeField field(lat, u);
        traj.times.push_back(static_cast<double>(k) * std::abs(config.dt));
        traj.states.push_back(field);
        traj.mass_series.push_back(discrete_mass(field));
        // Energy through the cached symbol (same quantity as discrete_energy).
        auto spec = fft_forward(u);
        double quad = 0.0, quart = 0.0;
        for (std::size_t j = 0; j < N; ++j) quad += symbol[j] / b * std::norm(spec[j]);
        for (const auto& z : u) quart += std::norm(z) * std::norm(z);
        traj.energy_series.push_back(0.5 * lat.h * quad + lambda * 0.25 * lat.h * quart);
        for (auto& series : traj.norm_series)
            series.values.push_back(discrete_norm(field, Norm::hsigma(series.sigma)));
    };

    std::vector<Cx> u = datum.values;
    const double linf0 = sup_abs(u);
    const std::size_t n = step_count(config);
    record(0, u);
    for (std::size_t k = 1; k <= n; ++k) {
        advance(u, phase, lambda, config.dt, config);
        check_state(u, linf0, config.blowup_factor, static_cast<double>(k) * config.dt,
                    "evolve_discrete");
        if (k % config.record_every == 0 || k == n) record(k, u);
    }
    return traj;
}

Trajectory evolve_continuum(const ContinuumFunction& datum, double alpha, double c,
                            const EvolutionConfig& config) {
    config.validate();
    if (!(alpha > 0.5) || !(alpha <= 1.0))
        throw std::invalid_argument("evolve_continuum: alpha must lie in (1/2, 1]");
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("evolve_continuum: c must be positive");

    const PeriodicLattice& fine = datum.fine_grid;
    const std::size_t M = fine.n_sites;
    const double lambda = config.sign == Sign::Defocusing ? 1.0 : -1.0;

    std::vector<double> mult(M);
    std::vector<Cx> phase(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double kappa = std::abs(fine.wavenumber(j)) / fine.h;
        mult[j] = c * std::pow(kappa, 2.0 * alpha);
        phase[j] = std::polar(1.0, -config.dt * mult[j]);
    }

    Trajectory traj;
    for (double s : config.norm_sigmas) traj.norm_series.push_back({s, {}});
    constexpr double kNoGuard = std::numeric_limits<double>::infinity();

    auto record = [&](std::size_t k, const std::vector<Cx>& u) {
        ContinuumFunction f(fine, u, Provenance::Evolved);
        traj.times.push_back(static_cast<double>(k) * std::abs(config.dt));
        traj.cstates.push_back(f);
        auto spec = fft_forward(u);
        double mass = 0.0, quad = 0.0, quart = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            mass += std::norm(u[j]);
            quad += mult[j] * std::norm(spec[j]);
            quart += std::norm(u[j]) * std::norm(u[j]);
        }
        traj.mass_series.push_back(fine.h * mass);
        traj.energy_series.push_back(0.5 * fine.h * quad + lambda * 0.25 * fine.h * quart);
        for (auto& series : traj.norm_series)
            series.values.push_back(continuum_norm(f, ContinuumNorm::hsigma(series.sigma), kNoGuard));
    };

    std::vector<Cx> u = datum.samples;
    const double linf0 = sup_abs(u);
    const std::size_t n = step_count(config);
    record(0, u);
    for (std::size_t k = 1; k <= n; ++k) {
        advance(u, phase, lambda, config.dt, config);
        check_state(u, linf0, config.blowup_factor, static_cast<double>(k) * config.dt,
                    "evolve_continuum");
        if (k % config.record_every == 0 || k == n) record(k, u);
    }
    return traj;
}

AprioriRecord track_apriori(const Trajectory& trajectory, double sigma, double bound_factor) {
    if (!(bound_factor > 0.0))
        throw std::invalid_argument("track_apriori: bound_factor must be positive");
    for (const auto& series : trajectory.norm_series) {
        if (series.sigma != sigma) continue;
        if (series.values.empty())
            throw std::invalid_argument("track_apriori: empty norm series");
        const double sup = *std::max_element(series.values.begin(), series.values.end());
        return {sup, sup <= bound_factor * series.values.front()};
    }
    throw std::invalid_argument("track_apriori: no norm series recorded for requested sigma");
}

double default_dt(const Kernel& kernel, const PeriodicLattice& lattice) {
    const auto symbol = lattice_symbol(kernel, lattice.n_sites);
    const double omega_max = *std::max_element(symbol.begin(), symbol.end());
    const double b = beta(kernel, lattice.h);
    return 1e-3 * std::min(1.0, b / omega_max);
}

void save_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trajectory_csv: cannot open " + path);
    out << "t,mass,energy";
    for (const auto& series : trajectory.norm_series) out << ",hsigma_" << series.sigma;
    out << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trajectory.n_records(); ++i) {
        out << trajectory.times[i] << "," << trajectory.mass_series[i] << ","
            << trajectory.energy_series[i];
        for (const auto& series : trajectory.norm_series) out << "," << series.values[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_trajectory_csv: write failed for " + path);
}

}  // namespace latnls
