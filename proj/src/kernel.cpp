#include "latnls/kernel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace latnls {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::int64_t kMaxExplicitTerms = std::int64_t(1) << 26;

bool is_infinite_class(double s) { return std::isinf(s); }

/// Kahan-compensated accumulator for long sums of nonnegative terms.
struct Accumulator {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

/// sum_{n > a} n^{-nu} by Euler-Maclaurin starting at a+1:
/// integral + midpoint + curvature corrections, error O(a^{-nu-5}).
double power_tail_monotone(double nu, double a) {
    const double a1 = a + 1.0;
    const double f = std::pow(a1, -nu);
    return a1 * f / (nu - 1.0) + 0.5 * f + nu * f / (12.0 * a1)
           - nu * (nu + 1.0) * (nu + 2.0) * f / (720.0 * a1 * a1 * a1);
}

/// sum_{n > a} n^{-nu} cos(nk) for k*a >> 1: Euler-Maclaurin applied to
/// g(x) = Re[x^{-nu} e^{ikx}] with the improper integral evaluated by the
/// integration-by-parts asymptotic series (truncated at its smallest term).
double power_tail_oscillatory(double nu, double a, double k) {
    const double x0 = a + 1.0;
    const std::complex<double> ik(0.0, k);
    const std::complex<double> phase = std::polar(std::pow(x0, -nu), k * x0);

    // integral_x0^inf x^{-nu} e^{ikx} dx = sum_m -x0^{-m} phase / (ik) * prod_{j<m} (nu+j)/(ik)
    std::complex<double> integral(0.0, 0.0);
    std::complex<double> factor = -phase / ik;
    double last = std::abs(factor);
    for (int m = 0; m < 24; ++m) {
        integral += factor;
        factor *= (nu + m) / (ik * x0);
        const double mag = std::abs(factor);
        if (mag < 1e-22 * std::abs(integral) || mag >= last) break;
        last = mag;
    }

    // Endpoint corrections: z = x^{-nu} e^{ikx}, z' = u z, z''' = (u'' + 3 u u' + u^3) z
    // with u = -nu/x + ik.
    const std::complex<double> u = -nu / x0 + ik;
    const std::complex<double> du = nu / (x0 * x0);
    const std::complex<double> ddu = -2.0 * nu / (x0 * x0 * x0);
    const std::complex<double> z1 = u * phase;
    const std::complex<double> z3 = (ddu + 3.0 * u * du + u * u * u) * phase;
    return (integral + 0.5 * phase - z1 / 12.0 + z3 / 720.0).real();
}

double omega_pure_power(double s, std::int64_t eval_cutoff, double k) {
    const double nu = 1.0 + 2.0 * s;
    const double ak = std::abs(k);
    std::int64_t n_terms = eval_cutoff;
    const double wanted = std::ceil(64.0 / ak);
    if (wanted > static_cast<double>(n_terms)) {
        n_terms = (wanted > static_cast<double>(kMaxExplicitTerms))
                      ? kMaxExplicitTerms
                      : static_cast<std::int64_t>(wanted);
    }
    Accumulator acc;
    for (std::int64_t n = 1; n <= n_terms; ++n) {
        const double sh = std::sin(0.5 * ak * static_cast<double>(n));
        acc.add(std::pow(static_cast<double>(n), -nu) * 2.0 * sh * sh);
    }
    const double a = static_cast<double>(n_terms);
    const double tail = power_tail_monotone(nu, a) - power_tail_oscillatory(nu, a, ak);
    return 2.0 * (acc.sum + tail);
}

double omega_exponential(double rate, double k) {
    const double q = std::exp(-rate);
    Accumulator acc;
    double jn = q;
    for (std::int64_t n = 1; n <= kMaxExplicitTerms; ++n) {
        const double sh = std::sin(0.5 * k * static_cast<double>(n));
        acc.add(jn * 2.0 * sh * sh);
        jn *= q;
        // Remaining terms are bounded by 2 * jn / (1 - q).
        if (2.0 * jn / (1.0 - q) < 1e-300 || 2.0 * jn / (1.0 - q) < 1e-18 * acc.sum) break;
    }
    return 2.0 * acc.sum;
}

/// sum_{l>=0} (l*N + a)^{-nu}: explicit terms plus Euler-Maclaurin in l.
double periodized_power_sum(double nu, double N, double a) {
    constexpr int kExplicit = 48;
    Accumulator acc;
    for (int l = 0; l < kExplicit; ++l)
        acc.add(std::pow(static_cast<double>(l) * N + a, -nu));
    const double x = static_cast<double>(kExplicit) * N + a;
    const double f = std::pow(x, -nu);
    const double tail = x * f / (N * (nu - 1.0)) + 0.5 * f + nu * N * f / (12.0 * x)
                        - nu * (nu + 1.0) * (nu + 2.0) * N * N * N * f / (720.0 * x * x * x);
    return acc.sum + tail;
}

} // namespace

KernelSpec KernelSpec::pure_power(double s) {
    KernelSpec spec;
    spec.family = KernelFamily::PurePower;
    spec.s = s;
    return spec;
}

KernelSpec KernelSpec::nearest_neighbor() {
    KernelSpec spec;
    spec.family = KernelFamily::NearestNeighbor;
    return spec;
}

KernelSpec KernelSpec::exponential(double rate) {
    KernelSpec spec;
    spec.family = KernelFamily::Exponential;
    spec.rate = rate;
    return spec;
}

KernelSpec KernelSpec::table(std::vector<double> values, double declared_class) {
    KernelSpec spec;
    spec.family = KernelFamily::Table;
    spec.values = std::move(values);
    spec.declared_class = declared_class;
    return spec;
}

double Kernel::coupling(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("Kernel::coupling: n must be >= 1");
    switch (spec.family) {
        case KernelFamily::PurePower:
            return std::pow(static_cast<double>(n), -1.0 - 2.0 * spec.s);
        case KernelFamily::NearestNeighbor:
            return n == 1 ? 1.0 : 0.0;
        case KernelFamily::Exponential:
            return std::exp(-spec.rate * static_cast<double>(n));
        case KernelFamily::Table:
            return n <= static_cast<std::int64_t>(spec.values.size())
                       ? spec.values[static_cast<std::size_t>(n - 1)]
                       : 0.0;
    }
    throw std::logic_error("Kernel::coupling: unknown family");
}

Kernel build_kernel(const KernelSpec& spec, std::int64_t eval_cutoff) {
    if (eval_cutoff < 1) throw std::invalid_argument("build_kernel: eval_cutoff must be >= 1");
    Kernel kernel;
    kernel.spec = spec;
    kernel.eval_cutoff = eval_cutoff;
    switch (spec.family) {
        case KernelFamily::PurePower:
            if (!(spec.s > 0.0))
                throw std::invalid_argument("build_kernel: PurePower requires s > 0");
            kernel.class_s = spec.s;
            kernel.tail_constant_A = 1.0;
            kernel.j1 = 1.0;
            break;
        case KernelFamily::NearestNeighbor:
            kernel.class_s = std::numeric_limits<double>::infinity();
            kernel.tail_constant_A = 0.0;
            kernel.j1 = 1.0;
            break;
        case KernelFamily::Exponential:
            if (!(spec.rate > 0.0))
                throw std::invalid_argument("build_kernel: Exponential requires rate > 0");
            kernel.class_s = std::numeric_limits<double>::infinity();
            kernel.tail_constant_A = 0.0;
            kernel.j1 = std::exp(-spec.rate);
            break;
        case KernelFamily::Table:
            if (spec.values.empty())
                throw std::invalid_argument("build_kernel: Table requires at least one coupling");
            if (!(spec.values.front() > 0.0))
                throw std::invalid_argument(
                    "build_kernel: Table first entry must be > 0 (adjacent sites must interact)");
            for (double v : spec.values)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw std::invalid_argument("build_kernel: Table entries must be finite and >= 0");
            if (!(spec.declared_class > 0.0))
                throw std::invalid_argument("build_kernel: Table declared_class must be > 0");
            kernel.class_s = spec.declared_class;
            kernel.tail_constant_A = 0.0;
            kernel.j1 = spec.values.front();
            break;
    }
    return kernel;
}

double beta(const Kernel& kernel, double h) {
    if (!(h > 0.0) || !(h < 1.0))
        throw std::invalid_argument("beta: h must lie in (0, 1), got " + std::to_string(h));
    const double s = kernel.class_s;
    if (!(s > 0.5))
        throw std::invalid_argument("beta: kernel decay class must exceed 1/2");
    if (s < 1.0) return std::pow(h, 2.0 * s);
    if (s == 1.0) return -std::log(h) * h * h;
    return h * h;
}

ScalingClass scaling_class(const Kernel& kernel) {
    const double s = kernel.class_s;
    if (!(s > 0.5))
        throw std::invalid_argument("scaling_class: kernel decay class must exceed 1/2");
    if (s < 1.0) return {Regime::Sub1, s};
    if (s == 1.0) return {Regime::Log, 1.0};
    return {Regime::Super1, 1.0};
}

double omega(const Kernel& kernel, double k) {
    if (!(std::abs(k) <= kPi))
        throw std::invalid_argument("omega: k must lie in [-pi, pi]");
    if (k == 0.0) return 0.0;
    switch (kernel.spec.family) {
        case KernelFamily::PurePower:
            return omega_pure_power(kernel.spec.s, kernel.eval_cutoff, k);
        case KernelFamily::NearestNeighbor: {
            const double sh = std::sin(0.5 * k);
            return 4.0 * sh * sh;
        }
        case KernelFamily::Exponential:
            return omega_exponential(kernel.spec.rate, k);
        case KernelFamily::Table: {
            double sum = 0.0;
            for (std::size_t i = 0; i < kernel.spec.values.size(); ++i) {
                const double sh = std::sin(0.5 * k * static_cast<double>(i + 1));
                sum += kernel.spec.values[i] * 2.0 * sh * sh;
            }
            return 2.0 * sum;
        }
    }
    throw std::logic_error("omega: unknown family");
}

double delta(const ScalingClass& scaling, double k) {
    const double ak = std::abs(k);
    if (ak == 0.0) throw std::invalid_argument("delta: k must be nonzero");
    switch (scaling.regime) {
        case Regime::Sub1:
            return std::pow(ak, 2.0 * scaling.alpha);
        case Regime::Log:
            if (!(ak < 1.0))
                throw std::invalid_argument("delta: Log regime requires 0 < |k| < 1");
            return -std::log(ak) * ak * ak;
        case Regime::Super1:
            return ak * ak;
    }
    throw std::logic_error("delta: unknown regime");
}

double cosine_tail_integral(double s) {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::invalid_argument("cosine_tail_integral: requires 0 < s < 1");
    return kPi / (4.0 * s * std::tgamma(2.0 * s) * std::sin(s * kPi));
}

double limit_constant_c(const Kernel& kernel) {
    const ScalingClass scaling = scaling_class(kernel);
    switch (scaling.regime) {
        case Regime::Sub1: {
            if (!(kernel.tail_constant_A > 0.0))
                throw std::invalid_argument(
                    "limit_constant_c: zero tail constant; declared class inconsistent with decay");
            return 2.0 * kernel.tail_constant_A * cosine_tail_integral(kernel.class_s);
        }
        case Regime::Log: {
            if (!(kernel.tail_constant_A > 0.0))
                throw std::invalid_argument(
                    "limit_constant_c: zero tail constant; declared class inconsistent with decay");
            return kernel.tail_constant_A;
        }
        case Regime::Super1: {
            // c = sum_{n>=1} n^2 J_n.
            switch (kernel.spec.family) {
                case KernelFamily::PurePower: {
                    const double expo = 2.0 * kernel.spec.s - 1.0;
                    if (!(expo > 1.0))
                        throw std::invalid_argument(
                            "limit_constant_c: sum n^2 J_n diverges; class inconsistent");
                    return std::riemann_zeta(expo);
                }
                case KernelFamily::NearestNeighbor:
                    return 1.0;
                case KernelFamily::Exponential: {
                    const double q = std::exp(-kernel.spec.rate);
                    return q * (1.0 + q) / ((1.0 - q) * (1.0 - q) * (1.0 - q));
                }
                case KernelFamily::Table: {
                    double sum = 0.0;
                    for (std::size_t i = 0; i < kernel.spec.values.size(); ++i) {
                        const double n = static_cast<double>(i + 1);
                        sum += n * n * kernel.spec.values[i];
                    }
                    return sum;
                }
            }
            throw std::logic_error("limit_constant_c: unknown family");
        }
    }
    throw std::logic_error("limit_constant_c: unknown regime");
}

std::vector<double> periodized_couplings(const Kernel& kernel, std::size_t N) {
    if (N < 4 || (N & (N - 1)) != 0)
        throw std::invalid_argument("periodized_couplings: N must be a power of two >= 4");
    const std::size_t half = N / 2;
    std::vector<double> tilde(half + 1, 0.0);
    switch (kernel.spec.family) {
        case KernelFamily::PurePower: {
            const double nu = 1.0 + 2.0 * kernel.spec.s;
            const double dN = static_cast<double>(N);
            for (std::size_t d = 1; d <= half; ++d) {
                tilde[d] = periodized_power_sum(nu, dN, static_cast<double>(d))
                           + periodized_power_sum(nu, dN, static_cast<double>(N - d));
            }
            break;
        }
        case KernelFamily::Exponential: {
            const double r = kernel.spec.rate;
            const double den = 1.0 - std::exp(-r * static_cast<double>(N));
            for (std::size_t d = 1; d <= half; ++d) {
                tilde[d] = (std::exp(-r * static_cast<double>(d))
                            + std::exp(-r * static_cast<double>(N - d))) / den;
            }
            break;
        }
        case KernelFamily::NearestNeighbor:
        case KernelFamily::Table: {
            const std::int64_t m = kernel.spec.family == KernelFamily::NearestNeighbor
                                       ? 1
                                       : static_cast<std::int64_t>(kernel.spec.values.size());
            const std::int64_t iN = static_cast<std::int64_t>(N);
            for (std::int64_t d = 1; d <= static_cast<std::int64_t>(half); ++d) {
                double sum = 0.0;
                for (std::int64_t n = d; n <= m; n += iN) sum += kernel.coupling(n);
                for (std::int64_t n = iN - d; n <= m; n += iN) sum += kernel.coupling(n);
                tilde[static_cast<std::size_t>(d)] = sum;
            }
            break;
        }
    }
    return tilde;
}

} // namespace latnls
