#pragma once

#include "latnls/kernel.hpp"
#include "latnls/lattice.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace latnls {

enum class Provenance { ClosedForm, Interpolated, Evolved };

/// A continuum function represented by samples on a fine periodic reference
/// grid (mesh h_ref, same period as the coarse lattices it is compared
/// against; h_ref must divide those coarse meshes exactly).
struct ContinuumFunction {
    PeriodicLattice fine_grid;
    std::vector<std::complex<double>> samples;
    Provenance provenance = Provenance::Interpolated;

    ContinuumFunction(PeriodicLattice grid, std::vector<std::complex<double>> samples_,
                      Provenance provenance_);
};

/// Samples a closed-form function on the fine grid.
ContinuumFunction sample_closed_form(const std::function<std::complex<double>(double)>& f,
                                     const PeriodicLattice& fine_grid);

/// Cell averages f_h(x_m) = (1/h) int_{x_m}^{x_{m+1}} f dx, computed by the
/// trapezoid rule over the fine-grid samples. Throws if the periods differ
/// or h_ref does not divide h.
LatticeField discretize(const ContinuumFunction& f, const PeriodicLattice& lattice);

/// Cell averages of a closed-form function by adaptive Gauss-Kronrod
/// quadrature (7-15 pair) to absolute tolerance ~1e-12 per cell.
LatticeField discretize(const std::function<std::complex<double>(double)>& f,
                        const PeriodicLattice& lattice);

/// Piecewise linear interpolant (p_h u)(x) = u(x_m) + (D+ u)(x_m) (x - x_m)
/// sampled on the fine grid.
ContinuumFunction p_linear(const LatticeField& field, const PeriodicLattice& fine_grid);

/// Piecewise constant (staircase) interpolant on the fine grid.
ContinuumFunction q_constant(const LatticeField& field, const PeriodicLattice& fine_grid);

/// Forward difference (D+ u)(x_m) = (u(x_{m+1}) - u(x_m))/h with periodic
/// wrap.
LatticeField forward_diff(const LatticeField& field);

/// Continuum norms by spectral quadrature on the fine grid, wavenumbers
/// kappa_j = 2 pi j / L. Hsigma weight is 1 + |kappa|^{2 sigma} (sigma in
/// [0,1], sigma = 0 reduces to L2); FractionalSeminorm weight is
/// |kappa|^{2 alpha} with alpha in (1/2, 1].
struct ContinuumNorm {
    enum class Kind { L2, Hsigma, FractionalSeminorm };
    Kind kind = Kind::L2;
    double sigma = 0.0;

    static ContinuumNorm l2() { return {Kind::L2, 0.0}; }
    static ContinuumNorm hsigma(double sigma) { return {Kind::Hsigma, sigma}; }
    static ContinuumNorm seminorm(double alpha) { return {Kind::FractionalSeminorm, alpha}; }
};

/// aliasing_guard: the norm refuses (throws) when the top decade of the
/// spectrum (|kappa| >= kappa_max/10) carries more than this fraction of the
/// peak modulus, indicating the grid under-resolves f. Piecewise
/// interpolants carry genuine O(kappa^{-1..-2}) spectral tails, so callers
/// computing interpolant norms disable the guard (pass infinity).
double continuum_norm(const ContinuumFunction& f, const ContinuumNorm& norm,
                      double aliasing_guard = 1e-10);

/// Fine-grid rectangle pairing h_ref * sum conj(a) b: the exact L2(0, L)
/// inner product of the trigonometric interpolants of a and b.
std::complex<double> continuum_pairing(const ContinuumFunction& a, const ContinuumFunction& b);

/// Composite-Simpson pairing with cells of r fine intervals (r even >= 2):
/// integrates conj(a) * b exactly when it is piecewise quadratic on those
/// cells, which is the case for products of piecewise-linear interpolants
/// with knots on the coarse lattice.
std::complex<double> simpson_pairing(const ContinuumFunction& a, const ContinuumFunction& b,
                                     std::size_t r);

/// The lattice-shift operator L^J_h extended to fine-grid functions: the
/// spectral multiplier omega(h kappa_j)/beta(h), evaluated through the ring
/// symbol (h kappa reduces mod 2 pi to a coarse ring frequency).
ContinuumFunction apply_LJ_extended(const ContinuumFunction& f, const Kernel& kernel, double h);

/// Same flat record as LatticeField plus a provenance byte; magic LNLSCFN1.
void save_continuum(const ContinuumFunction& f, const std::string& path);
ContinuumFunction load_continuum(const std::string& path);

} // namespace latnls
