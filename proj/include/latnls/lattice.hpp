#pragma once

#include "latnls/kernel.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace latnls {

/// Periodic truncation of the mesh-h lattice: N sites x_m = m*h, m = 0..N-1,
/// period L = N*h. N must be a power of two and h must lie in (0, 1).
struct PeriodicLattice {
    double h = 0.5;
    std::size_t n_sites = 4;
    double length = 2.0;

    PeriodicLattice(double h_, std::size_t n_sites_);

    double site(std::size_t m) const { return h * static_cast<double>(m); }

    /// Ring frequency k_j = 2*pi*j/N mapped to (-pi, pi] (transform index
    /// order: j > N/2 wraps to j - N).
    double wavenumber(std::size_t j) const;

    bool operator==(const PeriodicLattice& o) const {
        return h == o.h && n_sites == o.n_sites;
    }
};

/// One time slice of a complex lattice function. Entries are validated to be
/// finite at construction.
struct LatticeField {
    PeriodicLattice lattice;
    std::vector<std::complex<double>> values;

    LatticeField(PeriodicLattice lat, std::vector<std::complex<double>> vals);
};

/// Fourier-side representation; coefficient j belongs to wavenumber
/// lattice.wavenumber(j). The unitary normalization makes Parseval hold:
/// h * sum |u_m|^2 = h * sum |u_hat_j|^2.
struct SpectralField {
    PeriodicLattice lattice;
    std::vector<std::complex<double>> coefficients;

    SpectralField(PeriodicLattice lat, std::vector<std::complex<double>> coeffs);
};

SpectralField dft(const LatticeField& field);
LatticeField idft(const SpectralField& spec);

/// How couplings behave under the periodic truncation: ImageSum folds all
/// images J(lN +- d) into each ring distance (preserves the exact multiplier
/// identity with omega); TruncateHalf keeps only |n| <= N/2 (for sensitivity
/// studies).
enum class Periodization { ImageSum, TruncateHalf };

/// Per-residue coupling totals C_d, d = 1..N/2 (entry 0 unused), under the
/// chosen periodization. With ImageSum this is periodized_couplings().
std::vector<double> ring_couplings(const Kernel& kernel, std::size_t N,
                                   Periodization periodization = Periodization::ImageSum);

/// Symbol of the ring operator at frequency index j = 0..N-1 (without the
/// 1/beta factor): omega_N(k_j) = sum_{r=1}^{N-1} C_fold(r) (1 - cos r k_j).
/// Under ImageSum this equals the infinite-lattice omega(k_j) exactly.
/// Evaluated as a sum of nonnegative terms, so no cancellation occurs.
std::vector<double> lattice_symbol(const Kernel& kernel, std::size_t N,
                                   Periodization periodization = Periodization::ImageSum);

/// (L^J_h u)(x_m) = (1/beta(h)) sum_{n != 0} J_|n| [u(x_m) - u(x_m - x_n)]
/// on the ring, applied as the spectral multiplier omega_N(k_j)/beta(h).
LatticeField apply_LJ(const LatticeField& field, const Kernel& kernel,
                      Periodization periodization = Periodization::ImageSum);

/// Direct O(N^2) summation form of the same operator; used as an oracle for
/// the spectral path.
LatticeField apply_LJ_direct(const LatticeField& field, const Kernel& kernel,
                             Periodization periodization = Periodization::ImageSum);

/// Discrete norms. Hsigma uses the multiplier 1 + |k_j/h|^{2 sigma} for
/// sigma in (0, 1]; sigma = 0 reduces to L2 (weight 1, matching H^0 = L^2
/// rather than the degenerate 1 + |k|^0 = 2). DualHsigma inverts the same
/// weight. HJ is (L2^2 + (u, L^J_h u))^{1/2}; HtildeOne uses the
/// forward-difference multiplier 1 + h^{-2} * 4 sin^2(k_j / 2).
struct Norm {
    enum class Kind { L2, L4, Linf, Hsigma, HJ, HtildeOne, DualHsigma };
    Kind kind = Kind::L2;
    double sigma = 0.0;
    std::optional<Kernel> kernel;

    static Norm l2() { return {Kind::L2, 0.0, {}}; }
    static Norm l4() { return {Kind::L4, 0.0, {}}; }
    static Norm linf() { return {Kind::Linf, 0.0, {}}; }
    static Norm hsigma(double sigma) { return {Kind::Hsigma, sigma, {}}; }
    static Norm hj(Kernel kernel) { return {Kind::HJ, 0.0, std::move(kernel)}; }
    static Norm htilde_one() { return {Kind::HtildeOne, 0.0, {}}; }
    static Norm dual_hsigma(double sigma) { return {Kind::DualHsigma, sigma, {}}; }
};

/// Evaluates the requested norm. Throws for sigma outside [0, 1] (Hsigma,
/// DualHsigma) or a missing kernel (HJ).
double discrete_norm(const LatticeField& field, const Norm& norm);

enum class Sign { Focusing, Defocusing };

/// Mass N(u) = h * sum |u_m|^2.
double discrete_mass(const LatticeField& field);

/// Energy E(u) = (1/2) (u, L^J_h u)_{L^2_h} +- (1/4) ||u||_{L^4_h}^4
/// (+ defocusing, - focusing).
double discrete_energy(const LatticeField& field, const Kernel& kernel, Sign sign,
                       Periodization periodization = Periodization::ImageSum);

/// Flat binary field record: magic "LNLSFLD1", uint64 N, double h, then N
/// interleaved (re, im) double pairs, all little-endian host order.
void save_field(const LatticeField& field, const std::string& path);
LatticeField load_field(const std::string& path);

} // namespace latnls
