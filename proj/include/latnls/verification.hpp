#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latnls/interpolation.hpp"
#include "latnls/lattice.hpp"

namespace latnls {

struct CheckReport {
    std::string name;
    std::vector<double> h_ladder;
    /// Check-specific measurements (errors, ratio extrema, constants); the
    /// detail string says what they are.
    std::vector<double> measured;
    bool pass = false;
    double tolerance = 0.0;
    std::string detail;
};

/// Deterministic random field with spectral decay |u_hat(k_j)| ~
/// (1 + |k_j|/h)^{-decay}; same seed, same field, on any platform.
LatticeField spectral_random_field(const PeriodicLattice& lattice, double decay, uint64_t seed);

/// Ratio (1 + omega(k)/beta(h)) / (1 + |k/h|^{2 alpha}) over the (k, h) grid.
/// Pass: extrema positive and finite, and both vary by < 20% across the finer
/// half of the ladder. In the logarithmic regime the lower bound uses
/// exponent sigma_for_s1 (default 0.9) and the upper bound exponent 1.
/// For sub-1 pure-power kernels the measured minimum is additionally tested
/// against 0.9 x the explicit small-k/large-k split constant
/// min{c/2, (4 J_1/pi^2) k_0^{2-2 alpha}} with k_0 = 1/2.
CheckReport check_multiplier_equivalence(const Kernel& kernel, const std::vector<double>& h_ladder,
                                         const std::vector<double>& k_grid,
                                         std::optional<double> sigma_for_s1 = {});

/// || L^J_h phi - c (-Delta)^alpha phi ||_2 along the ladder, via the
/// lattice operator extended to the fine grid. Pass: errors strictly decrease
/// and final <= initial/10 (or phi = 0, where every error vanishes).
/// measured = per-h errors, then the fitted log-log slope, then the
/// Richardson-extrapolated constant estimate <target, L phi>/||target||^2.
CheckReport check_operator_limit(const Kernel& kernel, const ContinuumFunction& phi,
                                 const std::vector<double>& h_ladder);

/// <p_h w, p_h L^J_h u> vs <p_h L^J_h w, p_h u> under the exact piecewise
/// integral (Simpson on the fine grid). Pass: relative difference <= 1e-11.
CheckReport check_integration_by_parts(const LatticeField& w, const LatticeField& u,
                                       const Kernel& kernel);

struct FieldFamily {
    double decay = 2.0;
    std::size_t count = 200;
    uint64_t seed = 1;
    double box_length = 8.0;
};

/// Per-h maxima of the ratios LHS/RHS for the uniform discrete inequalities:
/// sup norm vs H^sigma (sigma > 1/2), the L4 interpolation bound, H^sigma vs
/// the classical first-difference norm, and the dual-norm bound for L^J.
/// Pass: every per-inequality ladder of maxima has max <= 1.5 x median.
CheckReport check_uniform_inequalities(const FieldFamily& family,
                                       const std::vector<double>& h_ladder, const Kernel& kernel,
                                       double sigma = 0.75);

/// Uniform bounds for cell-average discretization and piecewise-linear
/// interpolation over random spectrally-decaying continuum data:
/// ||f_h||_{H^sigma_h} <= C ||f||_{H^sigma} and ||p_h f_h||_{H^sigma} <=
/// C ||f_h||_{H^sigma_h}. Pass: same 1.5 x median ladder criterion.
CheckReport check_interpolation_bounds(const FieldFamily& family,
                                       const std::vector<double>& h_ladder, double sigma = 0.75);

/// omega(k_j)/delta(k_j) on k_j = 2^{-j}, j = 4..16, extrapolated at the
/// regime's leading correction order and compared with the closed-form limit
/// constant. Pass: relative error <= 1e-3.
CheckReport check_symbol_asymptotics(const Kernel& kernel);

/// One row per measured value: name,verdict,tolerance,index,value.
void save_check_reports_csv(const std::vector<CheckReport>& reports, const std::string& path);

/// One line per report: PASS/FAIL, name, detail.
std::string summarize_reports(const std::vector<CheckReport>& reports);

}  // namespace latnls
