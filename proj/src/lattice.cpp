#include "latnls/lattice.hpp"

#include "latnls/fft.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace latnls {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr char kFieldMagic[8] = {'L', 'N', 'L', 'S', 'F', 'L', 'D', '1'};

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void check_finite(const std::vector<std::complex<double>>& values, const char* who) {
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

/// fold(r) = min(r, N - r), the ring distance of residue r.
std::size_t fold(std::size_t r, std::size_t N) { return r <= N - r ? r : N - r; }

} // namespace

PeriodicLattice::PeriodicLattice(double h_, std::size_t n_sites_)
    : h(h_), n_sites(n_sites_), length(h_ * static_cast<double>(n_sites_)) {
    if (!(h > 0.0) || !(h < 1.0))
        throw std::invalid_argument("PeriodicLattice: h must lie in (0, 1)");
    if (!power_of_two(n_sites) || n_sites < 4)
        throw std::invalid_argument("PeriodicLattice: n_sites must be a power of two >= 4");
}

double PeriodicLattice::wavenumber(std::size_t j) const {
    if (j >= n_sites) throw std::out_of_range("wavenumber: index out of range");
    const auto half = n_sites / 2;
    const double signed_j = j <= half ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n_sites);
    return 2.0 * kPi * signed_j / static_cast<double>(n_sites);
}

LatticeField::LatticeField(PeriodicLattice lat, std::vector<std::complex<double>> vals)
    : lattice(lat), values(std::move(vals)) {
    if (values.size() != lattice.n_sites)
        throw std::invalid_argument("LatticeField: value count must equal n_sites");
    check_finite(values, "LatticeField");
}

SpectralField::SpectralField(PeriodicLattice lat, std::vector<std::complex<double>> coeffs)
    : lattice(lat), coefficients(std::move(coeffs)) {
    if (coefficients.size() != lattice.n_sites)
        throw std::invalid_argument("SpectralField: coefficient count must equal n_sites");
    check_finite(coefficients, "SpectralField");
}

SpectralField dft(const LatticeField& field) {
    return SpectralField(field.lattice, fft_forward(field.values));
}

LatticeField idft(const SpectralField& spec) {
    return LatticeField(spec.lattice, fft_inverse(spec.coefficients));
}

std::vector<double> ring_couplings(const Kernel& kernel, std::size_t N,
                                   Periodization periodization) {
    if (periodization == Periodization::ImageSum) return periodized_couplings(kernel, N);
    if (N < 4 || !power_of_two(N))
        throw std::invalid_argument("ring_couplings: N must be a power of two >= 4");
    const std::size_t half = N / 2;
    std::vector<double> c(half + 1, 0.0);
    for (std::size_t d = 1; d < half; ++d) c[d] = kernel.coupling(static_cast<std::int64_t>(d));
    // Both n = +N/2 and n = -N/2 land on the same residue.
    c[half] = 2.0 * kernel.coupling(static_cast<std::int64_t>(half));
    return c;
}

std::vector<double> lattice_symbol(const Kernel& kernel, std::size_t N,
                                   Periodization periodization) {
    const auto c = ring_couplings(kernel, N, periodization);
    const std::size_t half = N / 2;
    // Table of 1 - cos(2 pi q / N) = 2 sin^2(pi q / N).
    std::vector<double> one_minus_cos(N);
    for (std::size_t q = 0; q < N; ++q) {
        const double sh = std::sin(kPi * static_cast<double>(q) / static_cast<double>(N));
        one_minus_cos[q] = 2.0 * sh * sh;
    }
    std::vector<double> symbol(N, 0.0);
    for (std::size_t j = 1; j <= half; ++j) {
        double sum = 0.0;
        std::size_t q = 0;
        for (std::size_t d = 1; d < half; ++d) {
            q += j;
            if (q >= N) q -= N;
            sum += 2.0 * c[d] * one_minus_cos[q];
        }
        q += j;
        if (q >= N) q -= N;
        sum += c[half] * one_minus_cos[q];
        symbol[j] = sum;
        if (j < half) symbol[N - j] = sum;
    }
    return symbol;
}

namespace {

LatticeField apply_multiplier(const LatticeField& field, const std::vector<double>& mult) {
    auto spec = fft_forward(field.values);
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= mult[j];
    return LatticeField(field.lattice, fft_inverse(spec));
}

} // namespace

LatticeField apply_LJ(const LatticeField& field, const Kernel& kernel,
                      Periodization periodization) {
    const double b = beta(kernel, field.lattice.h);
    auto symbol = lattice_symbol(kernel, field.lattice.n_sites, periodization);
    for (double& w : symbol) w /= b;
    return apply_multiplier(field, symbol);
}

LatticeField apply_LJ_direct(const LatticeField& field, const Kernel& kernel,
                             Periodization periodization) {
    const std::size_t N = field.lattice.n_sites;
    const double b = beta(kernel, field.lattice.h);
    const auto c = ring_couplings(kernel, N, periodization);
    std::vector<std::complex<double>> out(N);
    for (std::size_t m = 0; m < N; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t r = 1; r < N; ++r) {
            const std::size_t src = (m + N - r) % N;
            acc += c[fold(r, N)] * (field.values[m] - field.values[src]);
        }
        out[m] = acc / b;
    }
    return LatticeField(field.lattice, std::move(out));
}

double discrete_mass(const LatticeField& field) {
    double sum = 0.0;
    for (const auto& z : field.values) sum += std::norm(z);
    return field.lattice.h * sum;
}

namespace {

double check_sigma(double sigma) {
    if (!(sigma >= 0.0) || !(sigma <= 1.0))
        throw std::invalid_argument("discrete_norm: sigma must lie in [0, 1]");
    return sigma;
}

/// h * sum_j w_j |u_hat_j|^2 for a spectral weight w.
template <typename W>
double weighted_spectral_square(const LatticeField& field, W weight) {
    const auto spec = fft_forward(field.values);
    const std::size_t N = field.lattice.n_sites;
    double sum = 0.0;
    for (std::size_t j = 0; j < N; ++j)
        sum += weight(field.lattice.wavenumber(j)) * std::norm(spec[j]);
    return field.lattice.h * sum;
}

} // namespace

double discrete_norm(const LatticeField& field, const Norm& norm) {
    const double h = field.lattice.h;
    switch (norm.kind) {
        case Norm::Kind::L2:
            return std::sqrt(discrete_mass(field));
        case Norm::Kind::L4: {
            double sum = 0.0;
            for (const auto& z : field.values) {
                const double a = std::norm(z);
                sum += a * a;
            }
            return std::pow(h * sum, 0.25);
        }
        case Norm::Kind::Linf: {
            double best = 0.0;
            for (const auto& z : field.values) best = std::max(best, std::abs(z));
            return best;
        }
        case Norm::Kind::Hsigma: {
            const double sigma = check_sigma(norm.sigma);
            if (sigma == 0.0) return std::sqrt(discrete_mass(field));
            return std::sqrt(weighted_spectral_square(field, [&](double k) {
                return 1.0 + std::pow(std::abs(k) / h, 2.0 * sigma);
            }));
        }
        case Norm::Kind::DualHsigma: {
            const double sigma = check_sigma(norm.sigma);
            if (sigma == 0.0) return std::sqrt(discrete_mass(field));
            return std::sqrt(weighted_spectral_square(field, [&](double k) {
                return 1.0 / (1.0 + std::pow(std::abs(k) / h, 2.0 * sigma));
            }));
        }
        case Norm::Kind::HtildeOne:
            return std::sqrt(weighted_spectral_square(field, [&](double k) {
                const double sh = std::sin(0.5 * k);
                return 1.0 + 4.0 * sh * sh / (h * h);
            }));
        case Norm::Kind::HJ: {
            if (!norm.kernel) throw std::invalid_argument("discrete_norm: HJ requires a kernel");
            const double b = beta(*norm.kernel, h);
            const auto symbol = lattice_symbol(*norm.kernel, field.lattice.n_sites);
            const auto spec = fft_forward(field.values);
            double sum = 0.0;
            for (std::size_t j = 0; j < spec.size(); ++j)
                sum += (1.0 + symbol[j] / b) * std::norm(spec[j]);
            return std::sqrt(h * sum);
        }
    }
    throw std::logic_error("discrete_norm: unknown kind");
}

double discrete_energy(const LatticeField& field, const Kernel& kernel, Sign sign,
                       Periodization periodization) {
    const double h = field.lattice.h;
    const double b = beta(kernel, h);
    const auto symbol = lattice_symbol(kernel, field.lattice.n_sites, periodization);
    const auto spec = fft_forward(field.values);
    double quad = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) quad += (symbol[j] / b) * std::norm(spec[j]);
    double quartic = 0.0;
    for (const auto& z : field.values) {
        const double a = std::norm(z);
        quartic += a * a;
    }
    const double interaction = 0.5 * h * quad;
    const double potential = 0.25 * h * quartic;
    return sign == Sign::Defocusing ? interaction + potential : interaction - potential;
}

void save_field(const LatticeField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field: cannot open " + path);
    out.write(kFieldMagic, sizeof(kFieldMagic));
    const std::uint64_t n = field.lattice.n_sites;
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&field.lattice.h), sizeof(double));
    for (const auto& z : field.values) {
        const double re = z.real(), im = z.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    if (!out) throw std::runtime_error("save_field: write failed for " + path);
}

LatticeField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_field: bad magic in " + path);
    std::uint64_t n = 0;
    double h = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in) throw std::runtime_error("load_field: truncated header in " + path);
    PeriodicLattice lattice(h, static_cast<std::size_t>(n));
    std::vector<std::complex<double>> values(lattice.n_sites);
    for (auto& z : values) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(re));
        in.read(reinterpret_cast<char*>(&im), sizeof(im));
        z = {re, im};
    }
    if (!in) throw std::runtime_error("load_field: truncated payload in " + path);
    return LatticeField(lattice, std::move(values));
}

} // namespace latnls
