#pragma once

#include <string>
#include <vector>

#include "latnls/interpolation.hpp"
#include "latnls/lattice.hpp"

namespace latnls {

/// Splitting scheme for the time integrator. Both substeps (pointwise cubic
/// phase, spectral linear phase) are solved exactly, so the scheme only
/// controls the splitting order: Strang is second order, Lie first order.
enum class Scheme { Strang, Lie };

struct EvolutionConfig {
    /// Step size. Negative values integrate backward in time (used by the
    /// reversibility checks); the run always takes round(t_final/|dt|) steps
    /// of exactly dt.
    double dt = 1e-3;
    double t_final = 1.0;
    Sign sign = Sign::Defocusing;
    Scheme scheme = Scheme::Strang;
    /// Trajectory decimation: record every record_every-th step (plus the
    /// initial and final states).
    std::size_t record_every = 1;
    /// Sobolev orders whose discrete/continuum norms are recorded alongside
    /// mass and energy.
    std::vector<double> norm_sigmas;
    /// Substep toggles. Disabling one yields the exactly solvable reduced
    /// flow, which the tests compare against closed forms.
    bool nonlinear_term = true;
    bool linear_term = true;
    /// Abort threshold: the run stops once the sup norm exceeds this multiple
    /// of the initial sup norm.
    double blowup_factor = 1e6;

    void validate() const;
};

struct Trajectory {
    /// Elapsed time from the start of the run (always increasing, also for
    /// backward runs).
    std::vector<double> times;
    /// Exactly one of these is populated, depending on the evolve_* entry.
    std::vector<LatticeField> states;
    std::vector<ContinuumFunction> cstates;
    std::vector<double> mass_series;
    std::vector<double> energy_series;
    struct NormSeries {
        double sigma = 0.0;
        std::vector<double> values;
    };
    std::vector<NormSeries> norm_series;

    std::size_t n_records() const { return times.size(); }
};

/// Integrates i du/dt = L^J_h u +- |u|^2 u on the ring carrying the datum.
/// The linear substep applies the exact spectral phase exp(-i dt omega/beta),
/// the nonlinear substep the exact pointwise phase exp(-+ i |u|^2 dt).
Trajectory evolve_discrete(const LatticeField& datum, const Kernel& kernel,
                           const EvolutionConfig& config);

/// Integrates i du/dt = c (-Delta)^alpha u +- |u|^2 u pseudo-spectrally on
/// the fine grid carrying the datum, alpha in (1/2, 1].
Trajectory evolve_continuum(const ContinuumFunction& datum, double alpha, double c,
                            const EvolutionConfig& config);

struct AprioriRecord {
    double sup_norm = 0.0;
    bool bounded = false;
};

/// Running supremum of the recorded H^sigma series and whether it stayed
/// below bound_factor times its initial value.
AprioriRecord track_apriori(const Trajectory& trajectory, double sigma,
                            double bound_factor = 10.0);

/// Conservative default step: 1e-3 * min(1, beta(h)/max_j omega(k_j)), so a
/// single linear step never advances any mode phase past ~1e-3 radians.
double default_dt(const Kernel& kernel, const PeriodicLattice& lattice);

/// Columns: t, mass, energy, then one column per recorded sigma.
void save_trajectory_csv(const Trajectory& trajectory, const std::string& path);

}  // namespace latnls
