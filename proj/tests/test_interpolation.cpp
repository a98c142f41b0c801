#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "latnls/interpolation.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>

using namespace latnls;
using std::complex;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Band-limited test function: modes |j| <= j_max with polynomial decay,
// coefficients drawn from the seeded Gaussian stream.
ContinuumFunction band_limited(const PeriodicLattice& fine, int j_max, uint64_t seed) {
    auto g = oracles::gaussian_vector(2 * j_max + 1, seed);
    const double L = fine.length;
    return sample_closed_form(
        [&](double x) {
            complex<double> acc = 0.0;
            for (int j = -j_max; j <= j_max; ++j) {
                acc += g[j + j_max] * std::pow(1.0 + std::abs(j), -1.5) *
                       std::exp(complex<double>(0.0, 2.0 * oracles::kPi * j * x / L));
            }
            return acc;
        },
        fine);
}

double fine_l2_distance(const ContinuumFunction& a, const ContinuumFunction& b) {
    REQUIRE(a.samples.size() == b.samples.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) acc += std::norm(a.samples[i] - b.samples[i]);
    return std::sqrt(a.fine_grid.h * acc);
}

}  // namespace

TEST_CASE("cell averages: constants, linear window, closed forms") {
    PeriodicLattice lat(0.25, 32);  // L = 8

    // Constant functions are reproduced exactly by any cell average.
    LatticeField c = discretize([](double) { return complex<double>(2.5, -1.0); }, lat);
    for (const auto& v : c.values) {
        CHECK(std::abs(v - complex<double>(2.5, -1.0)) < 1e-14);
    }

    // f(x) = x averages to x_m + h/2 on every cell (the sawtooth jump sits on
    // a cell boundary, so each cell sees a pure linear function).
    LatticeField lin = discretize([](double x) { return complex<double>(x, 0.0); }, lat);
    for (std::size_t m = 0; m < lat.n_sites; ++m) {
        CHECK(lin.values[m].real() == doctest::Approx(lat.site(m) + 0.125).epsilon(1e-13));
        CHECK(std::abs(lin.values[m].imag()) < 1e-15);
    }

    // Gaussian cell averages against the erf closed form.
    const double a = 2.0, ctr = 4.0;
    LatticeField gs = discretize(
        [&](double x) { return complex<double>(std::exp(-a * (x - ctr) * (x - ctr)), 0.0); }, lat);
    const double sa = std::sqrt(a);
    for (std::size_t m = 0; m < lat.n_sites; ++m) {
        const double x0 = lat.site(m), x1 = x0 + lat.h;
        const double exact =
            std::sqrt(oracles::kPi / a) / 2.0 * (std::erf(sa * (x1 - ctr)) - std::erf(sa * (x0 - ctr))) / lat.h;
        CHECK(gs.values[m].real() == doctest::Approx(exact).epsilon(1e-11));
    }

    // Trapezoid path (sampled input) against the exact average of a single
    // Fourier mode: (1/h) int_cell e^{i w x} dx = (e^{i w x1} - e^{i w x0})/(i w h).
    PeriodicLattice fine(std::pow(2.0, -13), std::size_t(8.0 * std::pow(2.0, 13)));
    const double w = 2.0 * oracles::kPi * 3.0 / 8.0;
    ContinuumFunction mode = sample_closed_form(
        [&](double x) { return std::exp(complex<double>(0.0, w * x)); }, fine);
    LatticeField md = discretize(mode, lat);
    for (std::size_t m = 0; m < lat.n_sites; ++m) {
        const double x0 = lat.site(m), x1 = x0 + lat.h;
        const complex<double> exact =
            (std::exp(complex<double>(0.0, w * x1)) - std::exp(complex<double>(0.0, w * x0))) /
            (complex<double>(0.0, w) * lat.h);
        CHECK(std::abs(md.values[m] - exact) < 1e-7);
    }

    // Sampled and closed-form paths agree on a band-limited function.
    ContinuumFunction bl = band_limited(fine, 6, 42);
    LatticeField via_samples = discretize(bl, lat);
    // Rebuild the same function as a callable for the adaptive path.
    auto g = oracles::gaussian_vector(13, 42);
    LatticeField via_quad = discretize(
        [&](double x) {
            complex<double> acc = 0.0;
            for (int j = -6; j <= 6; ++j) {
                acc += g[j + 6] * std::pow(1.0 + std::abs(j), -1.5) *
                       std::exp(complex<double>(0.0, 2.0 * oracles::kPi * j * x / 8.0));
            }
            return acc;
        },
        lat);
    for (std::size_t m = 0; m < lat.n_sites; ++m) {
        CHECK(std::abs(via_samples.values[m] - via_quad.values[m]) < 1e-6);
    }
}

TEST_CASE("construction and validation errors") {
    PeriodicLattice fine(0.03125, 256);  // L = 8
    std::vector<complex<double>> bad(256, 0.0);
    bad[3] = complex<double>(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(ContinuumFunction(fine, bad, Provenance::ClosedForm), std::invalid_argument);
    CHECK_THROWS_AS(ContinuumFunction(fine, std::vector<complex<double>>(255, 0.0), Provenance::ClosedForm),
                    std::invalid_argument);

    // Period mismatch between the function and the target lattice.
    ContinuumFunction f = band_limited(fine, 3, 7);
    PeriodicLattice other(0.25, 16);  // L = 4 != 8
    CHECK_THROWS_AS(discretize(f, other), std::invalid_argument);
    LatticeField u(other, std::vector<complex<double>>(16, 1.0));
    CHECK_THROWS_AS(p_linear(u, fine), std::invalid_argument);
    CHECK_THROWS_AS(q_constant(u, fine), std::invalid_argument);

    // Coarse mesh below the fine mesh is rejected.
    PeriodicLattice coarse8(0.5, 16);  // L = 8
    LatticeField v(coarse8, std::vector<complex<double>>(16, 1.0));
    PeriodicLattice finer_than(0.0625, 128);
    ContinuumFunction ph = p_linear(v, finer_than);
    CHECK(ph.samples.size() == 128);
    PeriodicLattice too_coarse(0.5, 16);
    LatticeField w(finer_than, std::vector<complex<double>>(128, 1.0));
    CHECK_THROWS_AS(p_linear(w, too_coarse), std::invalid_argument);
}

TEST_CASE("p_linear reproduces linear data and interpolates nodes") {
    PeriodicLattice lat(0.25, 32);
    PeriodicLattice fine(0.03125, 256);  // r = 8

    // Nodal values of discretize(x) are x_m + h/2; the interpolant continues
    // that as x + h/2 on fine points inside cells away from the wrap jump.
    LatticeField lin = discretize([](double x) { return complex<double>(x, 0.0); }, lat);
    ContinuumFunction ph = p_linear(lin, fine);
    for (std::size_t i = 0; i < fine.n_sites; ++i) {
        const double x = fine.site(i);
        if (x >= 7.75) continue;  // last coarse cell interpolates across the sawtooth jump
        CHECK(ph.samples[i].real() == doctest::Approx(x + 0.125).epsilon(1e-12));
    }

    // Interpolation property at the knots, and constants pass through.
    auto rnd = oracles::gaussian_vector(32, 11);
    LatticeField u(lat, rnd);
    ContinuumFunction pu = p_linear(u, fine);
    for (std::size_t m = 0; m < 32; ++m) {
        CHECK(std::abs(pu.samples[8 * m] - u.values[m]) < 1e-14);
    }
    LatticeField cst(lat, std::vector<complex<double>>(32, complex<double>(1.0, -2.0)));
    ContinuumFunction pc = p_linear(cst, fine);
    for (const auto& v : pc.samples) CHECK(std::abs(v - complex<double>(1.0, -2.0)) < 1e-14);
}

TEST_CASE("derivative identity: d/dx p_linear equals q_constant of the forward difference") {
    PeriodicLattice lat(0.25, 32);
    PeriodicLattice fine(0.03125, 256);
    LatticeField u(lat, oracles::gaussian_vector(32, 23));

    ContinuumFunction pu = p_linear(u, fine);
    ContinuumFunction qd = q_constant(forward_diff(u), fine);
    const std::size_t M = fine.n_sites;
    for (std::size_t i = 0; i < M; ++i) {
        const complex<double> fd = (pu.samples[(i + 1) % M] - pu.samples[i]) / fine.h;
        CHECK(std::abs(fd - qd.samples[i]) < 1e-11);
    }
}

TEST_CASE("q_constant is an isometry onto step functions") {
    PeriodicLattice lat(0.125, 64);
    PeriodicLattice fine(0.0078125, 1024);  // r = 16
    LatticeField u(lat, oracles::gaussian_vector(64, 31));

    ContinuumFunction qu = q_constant(u, fine);
    // Step values match the field on every fine point of the cell.
    for (std::size_t m = 0; m < 64; ++m) {
        for (std::size_t i = 16 * m; i < 16 * (m + 1); ++i) {
            CHECK(qu.samples[i] == u.values[m]);
        }
    }
    const double cont = continuum_norm(qu, ContinuumNorm::l2(), kInf);
    const double disc = discrete_norm(u, Norm::l2());
    CHECK(cont == doctest::Approx(disc).epsilon(1e-13));

    // Single site: ||q_h e_m||_2 = sqrt(h)|v|.
    std::vector<complex<double>> e(64, 0.0);
    e[5] = complex<double>(3.0, -4.0);
    ContinuumFunction qe = q_constant(LatticeField(lat, e), fine);
    CHECK(continuum_norm(qe, ContinuumNorm::l2(), kInf) ==
          doctest::Approx(std::sqrt(0.125) * 5.0).epsilon(1e-13));
}

TEST_CASE("forward difference: constants, windowed linear, shift theorem") {
    PeriodicLattice lat(0.25, 32);
    LatticeField cst(lat, std::vector<complex<double>>(32, complex<double>(4.0, 1.0)));
    for (const auto& v : forward_diff(cst).values) CHECK(std::abs(v) == 0.0);

    LatticeField lin = discretize([](double x) { return complex<double>(x, 0.0); }, lat);
    LatticeField dl = forward_diff(lin);
    for (std::size_t m = 0; m + 1 < 32; ++m) {
        CHECK(dl.values[m].real() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // dft(D+ u)_j = h^{-1} (e^{i k_j} - 1) dft(u)_j.
    LatticeField u(lat, oracles::gaussian_vector(32, 57));
    SpectralField du = dft(forward_diff(u));
    SpectralField su = dft(u);
    for (std::size_t j = 0; j < 32; ++j) {
        const complex<double> mult =
            (std::exp(complex<double>(0.0, lat.wavenumber(j))) - 1.0) / lat.h;
        CHECK(std::abs(du.coefficients[j] - mult * su.coefficients[j]) < 1e-12);
    }
}

TEST_CASE("continuum norms: Parseval, closed forms, aliasing guard") {
    PeriodicLattice fine(std::pow(2.0, -10), 8192);  // L = 8

    // Guard-free L2 equals the direct lattice sum (Parseval).
    ContinuumFunction rough(fine, [&] {
        auto v = oracles::gaussian_vector(8192, 77);
        return v;
    }(), Provenance::ClosedForm);
    double direct = 0.0;
    for (const auto& v : rough.samples) direct += std::norm(v);
    direct = std::sqrt(fine.h * direct);
    CHECK(continuum_norm(rough, ContinuumNorm::l2(), kInf) == doctest::Approx(direct).epsilon(1e-12));

    // Pure mode: ||f||_{H^sigma}^2 = L |A|^2 (1 + |kappa|^{2 sigma}),
    // seminorm drops the 1.
    const double L = 8.0;
    const double kappa = 2.0 * oracles::kPi * 5.0 / L;
    const complex<double> A(0.7, -0.2);
    ContinuumFunction mode = sample_closed_form(
        [&](double x) { return A * std::exp(complex<double>(0.0, kappa * x)); }, fine);
    for (double sigma : {0.5, 0.75, 1.0}) {
        const double expect = std::sqrt(L * std::norm(A) * (1.0 + std::pow(kappa, 2.0 * sigma)));
        CHECK(continuum_norm(mode, ContinuumNorm::hsigma(sigma)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    const double semi = std::sqrt(L * std::norm(A) * std::pow(kappa, 1.5));
    CHECK(continuum_norm(mode, ContinuumNorm::seminorm(0.75)) ==
          doctest::Approx(semi).epsilon(1e-12));

    // Gaussian L2 norm against quadrature: ||e^{-(x-c)^2}||_2^2 = sqrt(pi/2).
    PeriodicLattice wide(std::pow(2.0, -10) * 5.0, 4096);  // h_ref = 5/1024, L = 20
    ContinuumFunction gauss = sample_closed_form(
        [](double x) { return complex<double>(std::exp(-(x - 10.0) * (x - 10.0)), 0.0); }, wide);
    const double quad = oracles::simpson([](double x) { return std::exp(-2.0 * (x - 10.0) * (x - 10.0)); },
                                         2.0, 18.0, 40000);
    CHECK(quad == doctest::Approx(std::sqrt(oracles::kPi / 2.0)).epsilon(1e-13));
    const double nrm = continuum_norm(gauss, ContinuumNorm::l2());
    CHECK(nrm * nrm == doctest::Approx(quad).epsilon(1e-12));

    // sigma = 0 reduces to L2 and invalid orders are rejected.
    CHECK(continuum_norm(gauss, ContinuumNorm::hsigma(0.0)) == doctest::Approx(nrm).epsilon(1e-13));
    CHECK_THROWS_AS(continuum_norm(gauss, ContinuumNorm::hsigma(1.5)), std::invalid_argument);
    CHECK_THROWS_AS(continuum_norm(gauss, ContinuumNorm::seminorm(0.5)), std::invalid_argument);
    CHECK_THROWS_AS(continuum_norm(gauss, ContinuumNorm::seminorm(1.25)), std::invalid_argument);

    // A mode deep in the top decade of the spectrum trips the guard.
    const double hi = 2.0 * oracles::kPi * 2048.0 / L;  // |j| = 2048 of 4096, top half
    ContinuumFunction alias = sample_closed_form(
        [&](double x) { return std::exp(complex<double>(0.0, hi * x)); }, fine);
    CHECK_THROWS_AS(continuum_norm(alias, ContinuumNorm::l2()), std::runtime_error);
    CHECK(continuum_norm(alias, ContinuumNorm::l2(), kInf) > 0.0);

    // Piecewise interpolants carry genuine power-law tails, so the default
    // guard rejects them; explicit opt-out is the supported path.
    PeriodicLattice lat(0.25, 32);
    ContinuumFunction ph = p_linear(LatticeField(lat, oracles::gaussian_vector(32, 91)), fine);
    CHECK_THROWS_AS(continuum_norm(ph, ContinuumNorm::l2()), std::runtime_error);
    CHECK(continuum_norm(ph, ContinuumNorm::l2(), kInf) > 0.0);
}

TEST_CASE("uniform discretization and interpolation bounds across the mesh ladder") {
    const double L = 8.0;
    PeriodicLattice fine(std::pow(2.0, -13), std::size_t(L * std::pow(2.0, 13)));
    std::vector<ContinuumFunction> family;
    family.push_back(sample_closed_form(
        [](double x) { return complex<double>(std::exp(-2.0 * (x - 4.0) * (x - 4.0)), 0.0); }, fine));
    for (int t = 0; t < 3; ++t) family.push_back(band_limited(fine, 8, 99 + t));

    for (double sigma : {0.5, 1.0}) {
        double lo_d = kInf, hi_d = 0.0, lo_p = kInf, hi_p = 0.0;
        for (int e = 4; e <= 10; ++e) {
            const double h = std::pow(2.0, -e);
            PeriodicLattice lat(h, std::size_t(L / h));
            for (const auto& f : family) {
                LatticeField fh = discretize(f, lat);
                const double cont = continuum_norm(f, ContinuumNorm::hsigma(sigma), kInf);
                const double disc = discrete_norm(fh, Norm::hsigma(sigma));
                lo_d = std::min(lo_d, disc / cont);
                hi_d = std::max(hi_d, disc / cont);
                const double interp =
                    continuum_norm(p_linear(fh, fine), ContinuumNorm::hsigma(sigma), kInf);
                lo_p = std::min(lo_p, interp / disc);
                hi_p = std::max(hi_p, interp / disc);
            }
        }
        // One constant works across the whole ladder: for this smooth family
        // the ratios are pinned near 1 (measured spread < 0.1 percent at the
        // fine end, < 1 percent overall).
        CHECK(hi_d < 1.01);
        CHECK(lo_d > 0.99);
        CHECK(hi_p < 1.01);
        CHECK(lo_p > 0.99);
    }

    // Rough lattice data (no smooth parent): the interpolation bound still
    // holds with constant 1, uniformly in h.
    for (double sigma : {0.5, 1.0}) {
        double worst = 0.0;
        for (int e = 4; e <= 8; ++e) {
            const double h = std::pow(2.0, -e);
            PeriodicLattice lat(h, std::size_t(L / h));
            for (int t = 0; t < 4; ++t) {
                LatticeField u(lat, oracles::gaussian_vector(lat.n_sites, 7000 + 100 * e + t));
                const double num = continuum_norm(p_linear(u, fine), ContinuumNorm::hsigma(sigma), kInf);
                const double den = discrete_norm(u, Norm::hsigma(sigma));
                worst = std::max(worst, num / den);
            }
        }
        CHECK(worst < 1.0);   // smoothing only shrinks these norms
        CHECK(worst > 0.25);  // but not to nothing
    }
}

TEST_CASE("strong convergence of interpolants along the mesh ladder") {
    const double L = 8.0;
    PeriodicLattice fine(std::pow(2.0, -13), std::size_t(L * std::pow(2.0, 13)));
    ContinuumFunction f = sample_closed_form(
        [](double x) { return complex<double>(std::exp(-2.0 * (x - 4.0) * (x - 4.0)), 0.0); }, fine);

    double prev = kInf;
    double last = 0.0;
    for (int e = 4; e <= 9; ++e) {
        const double h = std::pow(2.0, -e);
        PeriodicLattice lat(h, std::size_t(L / h));
        ContinuumFunction ph = p_linear(discretize(f, lat), fine);
        const double err = fine_l2_distance(ph, f);
        CHECK(err < prev);
        if (prev < kInf) {
            // Cell averaging shifts nodal values by ~h f'/2, so the distance
            // decays at first order: halving h should halve the error.
            CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
        }
        prev = err;
        last = err;
    }
    CHECK(last < 2e-3);

    // H1 distance for the smooth function also decreases along the ladder.
    double prev_h1 = kInf;
    for (int e = 4; e <= 8; ++e) {
        const double h = std::pow(2.0, -e);
        PeriodicLattice lat(h, std::size_t(L / h));
        ContinuumFunction ph = p_linear(discretize(f, lat), fine);
        ContinuumFunction diff(fine, [&] {
            std::vector<complex<double>> d(fine.n_sites);
            for (std::size_t i = 0; i < fine.n_sites; ++i) d[i] = ph.samples[i] - f.samples[i];
            return d;
        }(), Provenance::Interpolated);
        const double err = continuum_norm(diff, ContinuumNorm::hsigma(1.0), kInf);
        CHECK(err < prev_h1);
        prev_h1 = err;
    }
}

TEST_CASE("extended operator matches the direct image-sum stencil on the fine grid") {
    // Small case where the O(M N) double sum is exact and cheap: M = 32 fine
    // points, r = 4, so the embedded ring has N = 8 sites.
    PeriodicLattice fine(0.0625, 32);  // L = 2
    const double h = 0.25;
    Kernel K = build_kernel(KernelSpec::pure_power(0.75));
    auto g = oracles::gaussian_vector(32, 3001);
    ContinuumFunction f(fine, g, Provenance::ClosedForm);

    ContinuumFunction lib = apply_LJ_extended(f, K, h);

    const std::size_t M = 32, r = 4, N = 8;
    const auto c = periodized_couplings(K, N);
    const double b = beta(K, h);
    for (std::size_t i = 0; i < M; ++i) {
        complex<double> acc = 0.0;
        for (std::size_t d = 1; d < N / 2; ++d) {
            acc += c[d] * (2.0 * g[i] - g[(i + r * d) % M] - g[(i + M - r * d) % M]);
        }
        acc += c[N / 2] * (g[i] - g[(i + r * (N / 2)) % M]);
        acc /= b;
        CHECK(std::abs(lib.samples[i] - acc) < 1e-11);
    }

    // Mesh mismatch is rejected: h not an integer multiple of the fine mesh.
    CHECK_THROWS_AS(apply_LJ_extended(f, K, 0.1), std::invalid_argument);
}

TEST_CASE("extended operator commutes with cell-average discretization") {
    const double L = 8.0;
    PeriodicLattice fine(0.0078125, 1024);
    const double h = 0.25;
    PeriodicLattice lat(h, 32);
    ContinuumFunction f = band_limited(fine, 10, 1234);

    for (const auto& spec : {KernelSpec::nearest_neighbor(), KernelSpec::pure_power(0.75)}) {
        Kernel K = build_kernel(spec);
        LatticeField path_a = discretize(apply_LJ_extended(f, K, h), lat);
        LatticeField path_b = apply_LJ(discretize(f, lat), K);
        double scale = 0.0;
        for (const auto& v : path_b.values) scale = std::max(scale, std::abs(v));
        for (std::size_t m = 0; m < lat.n_sites; ++m) {
            CHECK(std::abs(path_a.values[m] - path_b.values[m]) < 1e-11 * scale);
        }
    }
    (void)L;
}

TEST_CASE("pairings: rectangle rule, Simpson exactness on interpolants") {
    PeriodicLattice lat(0.25, 32);
    PeriodicLattice fine(0.015625, 512);  // r = 16
    LatticeField wf(lat, oracles::gaussian_vector(32, 401));
    LatticeField vf(lat, oracles::gaussian_vector(32, 402));

    ContinuumFunction pw = p_linear(wf, fine);
    ContinuumFunction pv = p_linear(vf, fine);

    // Oracle: exact integral of the product of two piecewise-linear functions
    // over each coarse cell, expanded in the nodal values and slopes:
    //   <p w, p v> = h sum conj(w) v + h^2/2 sum [conj(Dw) v + conj(w) Dv]
    //              + h^3/3 sum conj(Dw) Dv.
    const double h = lat.h;
    LatticeField dw = forward_diff(wf);
    LatticeField dv = forward_diff(vf);
    complex<double> exact = 0.0;
    for (std::size_t m = 0; m < lat.n_sites; ++m) {
        exact += h * std::conj(wf.values[m]) * vf.values[m];
        exact += 0.5 * h * h *
                 (std::conj(dw.values[m]) * vf.values[m] + std::conj(wf.values[m]) * dv.values[m]);
        exact += h * h * h / 3.0 * std::conj(dw.values[m]) * dv.values[m];
    }

    const complex<double> simp = simpson_pairing(pw, pv, 16);
    CHECK(std::abs(simp - exact) < 1e-13 * std::abs(exact) + 1e-14);

    // Hermitian symmetry and the rectangle-rule pairing for comparison.
    const complex<double> simp_t = simpson_pairing(pv, pw, 16);
    CHECK(std::abs(simp - std::conj(simp_t)) < 1e-13);
    const complex<double> rect = continuum_pairing(pw, pv);
    CHECK(std::abs(rect - exact) < 1e-2);   // rectangle rule picks up the knot kinks
    CHECK(std::abs(rect - exact) > 1e-5);   // and is measurably inexact here

    // Rectangle pairing against a spectral oracle on band-limited data.
    ContinuumFunction f1 = band_limited(fine, 5, 501);
    ContinuumFunction f2 = band_limited(fine, 5, 502);
    complex<double> direct = 0.0;
    for (std::size_t i = 0; i < fine.n_sites; ++i)
        direct += std::conj(f1.samples[i]) * f2.samples[i];
    direct *= fine.h;
    CHECK(std::abs(continuum_pairing(f1, f2) - direct) < 1e-13);

    CHECK_THROWS_AS(simpson_pairing(pw, pv, 5), std::invalid_argument);  // odd spacing
    CHECK_THROWS_AS(simpson_pairing(pw, pv, 0), std::invalid_argument);
    PeriodicLattice other_grid(0.03125, 256);
    ContinuumFunction f3 = band_limited(other_grid, 3, 503);
    CHECK_THROWS_AS(simpson_pairing(pw, f3, 16), std::invalid_argument);  // grid mismatch
    CHECK_THROWS_AS(continuum_pairing(pw, f3), std::invalid_argument);
}

TEST_CASE("serialization round trip and error paths") {
    PeriodicLattice fine(0.03125, 256);
    ContinuumFunction f = band_limited(fine, 4, 88);
    f.provenance = Provenance::Evolved;

    const std::string path = "continuum_roundtrip.bin";
    save_continuum(f, path);
    ContinuumFunction g = load_continuum(path);
    CHECK(g.fine_grid.n_sites == f.fine_grid.n_sites);
    CHECK(g.fine_grid.h == f.fine_grid.h);
    CHECK(g.provenance == Provenance::Evolved);
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        CHECK(g.samples[i].real() == f.samples[i].real());
        CHECK(g.samples[i].imag() == f.samples[i].imag());
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_continuum("no_such_file.bin"), std::runtime_error);
    {
        std::ofstream bad("bad_magic.bin", std::ios::binary);
        bad.write("XXXXYYYY", 8);
    }
    CHECK_THROWS_AS(load_continuum("bad_magic.bin"), std::runtime_error);
    std::remove("bad_magic.bin");
}
