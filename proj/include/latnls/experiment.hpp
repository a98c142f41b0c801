#pragma once

#include "latnls/dynamics.hpp"
#include "latnls/kernel.hpp"
#include "latnls/verification.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace latnls {

/// Initial-datum / test-function grammar: a closed-form profile (gaussian or
/// sech), optionally modulated by e^{i kappa x}, or raw samples loaded from a
/// file. File data holds one complex sample per line ("re im", "re,im" or a
/// bare real) on a uniform power-of-two grid over the same period; it is
/// carried onto finer grids by trigonometric interpolation.
struct DatumSpec {
    enum class Kind { Gaussian, Sech, File };
    Kind kind = Kind::Gaussian;
    double width = 1.0;
    double center = 0.0;
    double amplitude = 1.0;  // gaussian only
    double modulation = 0.0; // kappa in the e^{i kappa x} factor, 0 = none
    std::string path;        // file only

    static DatumSpec gaussian(double width, double center, double amplitude = 1.0);
    static DatumSpec sech(double width, double center);
    static DatumSpec modulated(DatumSpec base, double kappa);
    static DatumSpec from_file(std::string path);

    void validate() const;
};

/// Samples the spec on the fine grid; amplitude * exp(-((x-c)/w)^2) for
/// gaussian, 1/cosh((x-c)/w) for sech.
ContinuumFunction sample_datum(const DatumSpec& spec, const PeriodicLattice& fine_grid);

struct ExperimentConfig {
    KernelSpec kernel;
    std::vector<double> h_ladder; // strictly descending, each in (0, 1)
    double box_length = 64.0;
    DatumSpec datum;
    Sign sign = Sign::Defocusing;
    double t_final = 0.5;
    double dt = 1e-3;
    std::vector<DatumSpec> test_functions;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    /// Number of report times, t = 0 included (>= 2; the run is split into
    /// samples-1 equal segments of whole steps).
    std::size_t samples = 6;
    /// Reference resolution: the continuum solver runs on mesh
    /// h_min/reference_refine (power of two) with step dt/reference_dt_refine.
    std::size_t reference_refine = 8;
    std::size_t reference_dt_refine = 10;

    void validate() const;
};

struct ReportRow {
    double h = 0.0;
    std::size_t n_sites = 0;
    double t = 0.0;
    double l2_error = 0.0;
    std::vector<double> weak_pairing_errors; // one per test function
    double h_alpha_norm = 0.0;
    double mass_drift = 0.0;
    double energy_drift = 0.0;
};

struct ExperimentResult {
    std::vector<ReportRow> rows; // ladder-major, then time
    double alpha = 0.0;
    double limit_c = 0.0;
    /// Fitted log-log slopes of the final-time error columns vs h.
    double l2_slope = 0.0;
    std::vector<double> pairing_slopes;
    /// sup over sampled times of ||p_h u_h||_{H^alpha}, one entry per h.
    std::vector<double> sup_h_alpha;
    /// Non-monotone error columns, named with the offending time.
    std::vector<std::string> warnings;
    std::string csv_path;
    std::string summary;
};

/// Runs the lattice-vs-continuum convergence experiment: evolves the
/// discretized datum on every ladder mesh, compares the piecewise-linear
/// interpolants against a refined continuum reference at the sampled times,
/// and writes continuum_limit.csv plus a slope summary to output_dir.
/// Ladder members run concurrently; failures carry the offending h.
ExperimentResult run_continuum_limit(const ExperimentConfig& config);

struct SuiteResult {
    std::vector<CheckReport> reports;
    bool all_pass = true;
    std::vector<std::string> csv_paths;
    std::string summary;
};

/// Full check battery (symbol asymptotics, multiplier equivalence, operator
/// limit, integration by parts, uniform inequalities) for each kernel spec,
/// plus the kernel-independent interpolation bounds; one CSV per kernel in
/// output_dir. Deterministic for a fixed seed. field_count sets the random
/// fields per mesh in the inequality checks.
SuiteResult run_check_suite(const std::vector<KernelSpec>& specs, std::uint64_t seed,
                            const std::string& output_dir = ".",
                            std::size_t field_count = 200);

/// Reads a sectioned key = value config. Errors carry path and line number;
/// unknown keys and sections are rejected.
ExperimentConfig parse_config(const std::string& path);

/// Normalized rendering; parse(emit(parse(f))) equals parse(f).
std::string emit_config(const ExperimentConfig& config);

/// CSV artifact: "# continuum_limit v1", a header naming every ReportRow
/// field, then one row per (h, t) sample. Rejects non-finite entries.
void emit_report(const std::vector<ReportRow>& rows, const std::string& path);

/// Caps the worker threads used by ladder members and suite jobs; 0 restores
/// the hardware default.
void set_max_threads(unsigned n);

} // namespace latnls
