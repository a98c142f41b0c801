#include "latnls/interpolation.hpp"

#include "latnls/fft.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace latnls {
namespace {

// Gauss-Kronrod 7-15 pair on [-1, 1] (QUADPACK dqk15 constants). Gauss
// nodes are the odd-indexed abscissae plus the center.
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct GkResult {
    std::complex<double> kronrod;
    double error;
};

GkResult gk15(const std::function<std::complex<double>(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    std::complex<double> kron = kWgk[7] * f(c);
    std::complex<double> gauss = kWg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const std::complex<double> lo = f(c - half * kXgk[i]);
        const std::complex<double> hi = f(c + half * kXgk[i]);
        kron += kWgk[i] * (lo + hi);
        if (i % 2 == 1) gauss += kWg[i / 2] * (lo + hi);
    }
    kron *= half;
    gauss *= half;
    return {kron, std::abs(kron - gauss)};
}

std::complex<double> gk_adaptive(const std::function<std::complex<double>(double)>& f, double a,
                                 double b, double tol, int depth) {
    const GkResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= 30) return r.kronrod;
    const double c = 0.5 * (a + b);
    return gk_adaptive(f, a, c, 0.5 * tol, depth + 1)
           + gk_adaptive(f, c, b, 0.5 * tol, depth + 1);
}

/// Number of fine samples per coarse cell; validates exact divisibility.
std::size_t cells_ratio(const PeriodicLattice& fine, const PeriodicLattice& coarse,
                        const char* who) {
    if (fine.length != coarse.length)
        throw std::invalid_argument(std::string(who) + ": period mismatch");
    const double ratio = coarse.h / fine.h;
    const auto r = static_cast<std::size_t>(std::llround(ratio));
    if (r < 1 || static_cast<double>(r) * fine.h != coarse.h)
        throw std::invalid_argument(std::string(who) + ": fine mesh must divide coarse mesh");
    return r;
}

} // namespace

ContinuumFunction::ContinuumFunction(PeriodicLattice grid,
                                     std::vector<std::complex<double>> samples_,
                                     Provenance provenance_)
    : fine_grid(grid), samples(std::move(samples_)), provenance(provenance_) {
    if (samples.size() != fine_grid.n_sites)
        throw std::invalid_argument("ContinuumFunction: sample count must equal grid size");
    for (const auto& z : samples)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("ContinuumFunction: non-finite sample");
}

ContinuumFunction sample_closed_form(const std::function<std::complex<double>(double)>& f,
                                     const PeriodicLattice& fine_grid) {
    std::vector<std::complex<double>> samples(fine_grid.n_sites);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = f(fine_grid.site(i));
    return ContinuumFunction(fine_grid, std::move(samples), Provenance::ClosedForm);
}

LatticeField discretize(const ContinuumFunction& f, const PeriodicLattice& lattice) {
    const std::size_t r = cells_ratio(f.fine_grid, lattice, "discretize");
    const std::size_t M = f.fine_grid.n_sites;
    std::vector<std::complex<double>> values(lattice.n_sites);
    for (std::size_t m = 0; m < lattice.n_sites; ++m) {
        std::complex<double> acc = 0.5 * (f.samples[m * r] + f.samples[(m * r + r) % M]);
        for (std::size_t i = 1; i < r; ++i) acc += f.samples[m * r + i];
        values[m] = acc / static_cast<double>(r);
    }
    return LatticeField(lattice, std::move(values));
}

LatticeField discretize(const std::function<std::complex<double>(double)>& f,
                        const PeriodicLattice& lattice) {
    std::vector<std::complex<double>> values(lattice.n_sites);
    for (std::size_t m = 0; m < lattice.n_sites; ++m) {
        const double a = lattice.site(m);
        const double b = a + lattice.h;
        const GkResult probe = gk15(f, a, b);
        const double tol = 1e-12 * std::max(1.0, std::abs(probe.kronrod));
        values[m] = gk_adaptive(f, a, b, tol, 0) / lattice.h;
    }
    return LatticeField(lattice, std::move(values));
}

ContinuumFunction p_linear(const LatticeField& field, const PeriodicLattice& fine_grid) {
    const std::size_t r = cells_ratio(fine_grid, field.lattice, "p_linear");
    const std::size_t N = field.lattice.n_sites;
    std::vector<std::complex<double>> samples(fine_grid.n_sites);
    for (std::size_t m = 0; m < N; ++m) {
        const auto& u0 = field.values[m];
        const auto& u1 = field.values[(m + 1) % N];
        for (std::size_t i = 0; i < r; ++i)
            samples[m * r + i] = u0 + (u1 - u0) * (static_cast<double>(i) / static_cast<double>(r));
    }
    return ContinuumFunction(fine_grid, std::move(samples), Provenance::Interpolated);
}

ContinuumFunction q_constant(const LatticeField& field, const PeriodicLattice& fine_grid) {
    const std::size_t r = cells_ratio(fine_grid, field.lattice, "q_constant");
    std::vector<std::complex<double>> samples(fine_grid.n_sites);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = field.values[i / r];
    return ContinuumFunction(fine_grid, std::move(samples), Provenance::Interpolated);
}

LatticeField forward_diff(const LatticeField& field) {
    const std::size_t N = field.lattice.n_sites;
    std::vector<std::complex<double>> values(N);
    for (std::size_t m = 0; m < N; ++m)
        values[m] = (field.values[(m + 1) % N] - field.values[m]) / field.lattice.h;
    return LatticeField(field.lattice, std::move(values));
}

double continuum_norm(const ContinuumFunction& f, const ContinuumNorm& norm,
                      double aliasing_guard) {
    const auto spec = fft_forward(f.samples);
    const std::size_t M = f.fine_grid.n_sites;
    const double h_ref = f.fine_grid.h;

    double peak = 0.0, top = 0.0;
    const double kappa_max = 3.14159265358979323846 / h_ref;
    for (std::size_t j = 0; j < M; ++j) {
        const double mag = std::abs(spec[j]);
        peak = std::max(peak, mag);
        if (std::abs(f.fine_grid.wavenumber(j)) / h_ref >= 0.1 * kappa_max)
            top = std::max(top, mag);
    }
    if (peak > 0.0 && top > aliasing_guard * peak)
        throw std::runtime_error("continuum_norm: aliasing guard violated");

    double sigma = norm.sigma;
    switch (norm.kind) {
        case ContinuumNorm::Kind::L2:
            sigma = 0.0;
            break;
        case ContinuumNorm::Kind::Hsigma:
            if (!(sigma >= 0.0) || !(sigma <= 1.0))
                throw std::invalid_argument("continuum_norm: sigma must lie in [0, 1]");
            break;
        case ContinuumNorm::Kind::FractionalSeminorm:
            if (!(sigma > 0.5) || !(sigma <= 1.0))
                throw std::invalid_argument("continuum_norm: alpha must lie in (1/2, 1]");
            break;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double kappa = std::abs(f.fine_grid.wavenumber(j)) / h_ref;
        double w = 1.0;
        if (norm.kind == ContinuumNorm::Kind::Hsigma && sigma > 0.0)
            w = 1.0 + std::pow(kappa, 2.0 * sigma);
        else if (norm.kind == ContinuumNorm::Kind::FractionalSeminorm)
            w = std::pow(kappa, 2.0 * sigma);
        sum += w * std::norm(spec[j]);
    }
    return std::sqrt(h_ref * sum);
}

std::complex<double> continuum_pairing(const ContinuumFunction& a, const ContinuumFunction& b) {
    if (!(a.fine_grid == b.fine_grid))
        throw std::invalid_argument("continuum_pairing: grids must match");
    std::complex<double> sum(0.0, 0.0);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        sum += std::conj(a.samples[i]) * b.samples[i];
    return a.fine_grid.h * sum;
}

std::complex<double> simpson_pairing(const ContinuumFunction& a, const ContinuumFunction& b,
                                     std::size_t r) {
    if (!(a.fine_grid == b.fine_grid))
        throw std::invalid_argument("simpson_pairing: grids must match");
    if (r < 2 || r % 2 != 0 || a.samples.size() % r != 0)
        throw std::invalid_argument("simpson_pairing: r must be even and divide the grid");
    const std::size_t M = a.samples.size();
    auto f = [&](std::size_t i) { return std::conj(a.samples[i % M]) * b.samples[i % M]; };
    std::complex<double> sum(0.0, 0.0);
    for (std::size_t cell = 0; cell < M; cell += r) {
        std::complex<double> acc = f(cell) + f(cell + r);
        for (std::size_t i = 1; i < r; ++i) acc += f(cell + i) * (i % 2 ? 4.0 : 2.0);
        sum += acc;
    }
    return sum * (a.fine_grid.h / 3.0);
}

ContinuumFunction apply_LJ_extended(const ContinuumFunction& f, const Kernel& kernel, double h) {
    PeriodicLattice coarse(h, [&] {
        const double ratio = h / f.fine_grid.h;
        const auto r = static_cast<std::size_t>(std::llround(ratio));
        if (r < 1 || static_cast<double>(r) * f.fine_grid.h != h)
            throw std::invalid_argument("apply_LJ_extended: fine mesh must divide h");
        return f.fine_grid.n_sites / r;
    }());
    const double b = beta(kernel, h);
    const auto symbol = lattice_symbol(kernel, coarse.n_sites);
    auto spec = fft_forward(f.samples);
    const std::size_t N = coarse.n_sites;
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= symbol[j % N] / b;
    return ContinuumFunction(f.fine_grid, fft_inverse(spec), f.provenance);
}

namespace {
constexpr char kContinuumMagic[8] = {'L', 'N', 'L', 'S', 'C', 'F', 'N', '1'};
}

void save_continuum(const ContinuumFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_continuum: cannot open " + path);
    out.write(kContinuumMagic, sizeof(kContinuumMagic));
    const std::uint64_t n = f.fine_grid.n_sites;
    const auto tag = static_cast<std::uint8_t>(f.provenance);
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&f.fine_grid.h), sizeof(double));
    out.write(reinterpret_cast<const char*>(&tag), sizeof(tag));
    for (const auto& z : f.samples) {
        const double re = z.real(), im = z.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    if (!out) throw std::runtime_error("save_continuum: write failed for " + path);
}

ContinuumFunction load_continuum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_continuum: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kContinuumMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_continuum: bad magic in " + path);
    std::uint64_t n = 0;
    double h = 0.0;
    std::uint8_t tag = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    in.read(reinterpret_cast<char*>(&tag), sizeof(tag));
    if (!in || tag > 2) throw std::runtime_error("load_continuum: bad header in " + path);
    PeriodicLattice grid(h, static_cast<std::size_t>(n));
    std::vector<std::complex<double>> samples(grid.n_sites);
    for (auto& z : samples) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(re));
        in.read(reinterpret_cast<char*>(&im), sizeof(im));
        z = {re, im};
    }
    if (!in) throw std::runtime_error("load_continuum: truncated payload in " + path);
    return ContinuumFunction(grid, std::move(samples), static_cast<Provenance>(tag));
}

} // namespace latnls
