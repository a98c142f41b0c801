#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace latnls {

/// Interaction kernel families on the lattice: couplings J_n between sites at
/// distance n. PurePower decays like n^{-1-2s}; NearestNeighbor couples only
/// adjacent sites; Exponential decays like e^{-rate*n}; Table is an explicit
/// finite list of couplings with a user-declared decay class.
enum class KernelFamily { PurePower, NearestNeighbor, Exponential, Table };

struct KernelSpec {
    KernelFamily family = KernelFamily::NearestNeighbor;
    double s = 0.0;               // PurePower exponent
    double rate = 0.0;            // Exponential decay rate
    std::vector<double> values;   // Table couplings J_1..J_m
    double declared_class = std::numeric_limits<double>::infinity();  // Table only

    static KernelSpec pure_power(double s);
    static KernelSpec nearest_neighbor();
    static KernelSpec exponential(double rate);
    static KernelSpec table(std::vector<double> values,
                            double declared_class = std::numeric_limits<double>::infinity());
};

/// A validated kernel. class_s is the decay class (s with lim n^{1+2s} J_n
/// finite and positive; +infinity for faster-than-any-power decay) and
/// tail_constant_A that limit (0 for the infinite class). eval_cutoff is the
/// number of terms summed explicitly before tail corrections take over.
struct Kernel {
    KernelSpec spec;
    double class_s = std::numeric_limits<double>::infinity();
    double tail_constant_A = 0.0;
    double j1 = 0.0;
    std::int64_t eval_cutoff = 100000;

    /// Coupling J_n for n >= 1.
    double coupling(std::int64_t n) const;
};

/// Scaling regime of the continuum limit. alpha is the order of the limiting
/// fractional Laplacian: alpha = s for 1/2 < s < 1 (Sub1), alpha = 1 for the
/// logarithmic boundary case s = 1 (Log) and for s > 1 or infinite (Super1).
enum class Regime { Sub1, Log, Super1 };

struct ScalingClass {
    Regime regime = Regime::Super1;
    double alpha = 1.0;
};

/// Validates the spec and fills in decay class, tail constant and J_1.
/// Throws std::invalid_argument for nonpositive s or rate, an empty table,
/// a table whose first entry is 0, or eval_cutoff < 1.
Kernel build_kernel(const KernelSpec& spec, std::int64_t eval_cutoff = 100000);

/// Mesh-dependent normalization beta(h): h^{2s} for 1/2 < s < 1,
/// (-log h)*h^2 for s = 1, h^2 for s > 1 or infinite class.
/// Throws if class_s <= 1/2 or h is outside (0, 1).
double beta(const Kernel& kernel, double h);

/// Scaling regime and limit exponent for the kernel's decay class.
/// Throws if class_s <= 1/2 (no continuum regime applies).
ScalingClass scaling_class(const Kernel& kernel);

/// Dispersion symbol omega(k) = 2 * sum_{n>=1} J_n (1 - cos nk) for
/// k in [-pi, pi]. Summed explicitly to eval_cutoff (extended automatically
/// at small k so the tail expansion converges) with Euler-Maclaurin plus
/// oscillatory-integral tail corrections for power-law kernels and a
/// geometric-bound termination for exponential ones.
double omega(const Kernel& kernel, double k);

/// Small-k comparison function: |k|^{2 alpha} (Sub1), (-log|k|)*k^2 (Log,
/// requires 0 < |k| < 1), k^2 (Super1). Throws for k = 0.
double delta(const ScalingClass& scaling, double k);

/// Limiting dispersion coefficient c = lim_{k->0} omega(k)/delta(k):
/// 2*A*integral of (1-cos x)/x^{1+2s} for Sub1, A = lim n^3 J_n for Log,
/// sum n^2 J_n for Super1. Throws when the declared class is inconsistent
/// with the kernel's actual decay (zero tail constant, divergent sum).
double limit_constant_c(const Kernel& kernel);

/// Closed form of the improper integral int_0^inf (1 - cos x) x^{-1-2s} dx
/// = pi / (4 s Gamma(2s) sin(pi s)), valid for 0 < s < 1.
double cosine_tail_integral(double s);

/// Couplings of the periodized operator on an N-site ring: entry d (for
/// d = 1..N/2, entry 0 unused) is sum_{l>=0} J(lN+d) + sum_{l>=1} J(lN-d).
/// Distances d > N/2 fold back via the symmetry tilde-J_d = tilde-J_{N-d}.
std::vector<double> periodized_couplings(const Kernel& kernel, std::size_t N);

} // namespace latnls
