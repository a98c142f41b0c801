#include "latnls/experiment.hpp"

#include "latnls/fft.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace latnls {
namespace {

using Cx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::atomic<unsigned> g_max_threads{0};

unsigned worker_limit() {
    unsigned v = g_max_threads.load();
    if (v != 0) return v;
    unsigned hw = std::thread::hardware_concurrency();
    return hw != 0 ? hw : 1;
}

/// Runs fn(0..count-1) on up to worker_limit() threads. Results must be
/// slotted by index by the caller; the first exception (by index) rethrows
/// after all workers finish, so no task is abandoned mid-write.
void parallel_run(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t workers = std::min<std::size_t>(count, worker_limit());
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

bool power_of_two(long long n) { return n >= 2 && (n & (n - 1)) == 0; }

std::size_t sites_for(double box_length, double h) {
    const long long n = std::llround(box_length / h);
    if (!power_of_two(n) || std::abs(static_cast<double>(n) * h - box_length) > 1e-9 * box_length)
        throw std::invalid_argument("h = " + fmt(h) + " does not divide box_length = " +
                                    fmt(box_length) + " into a power-of-two site count");
    return static_cast<std::size_t>(n);
}

std::string kernel_slug(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::PurePower: return "pure_power_" + fmt(spec.s);
        case KernelFamily::NearestNeighbor: return "nearest_neighbor";
        case KernelFamily::Exponential: return "exponential_" + fmt(spec.rate);
        case KernelFamily::Table: return "table_" + std::to_string(spec.values.size());
    }
    return "kernel";
}

std::string describe_kernel(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::PurePower: return "pure_power(s = " + fmt(spec.s) + ")";
        case KernelFamily::NearestNeighbor: return "nearest_neighbor";
        case KernelFamily::Exponential: return "exponential(rate = " + fmt(spec.rate) + ")";
        case KernelFamily::Table:
            return "table(" + std::to_string(spec.values.size()) +
                   " couplings, class_s = " + fmt(spec.declared_class) + ")";
    }
    return "kernel";
}

/// Least-squares slope of log(err) vs log(h); NaN when a value is
/// nonpositive or fewer than two points are available.
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(err[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(h.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// ---------------------------------------------------------------------------
// datum sampling

std::vector<Cx> read_datum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open datum file");
    std::vector<Cx> vals;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream is(t);
        double re = 0.0, im = 0.0;
        if (!(is >> re))
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": expected a number");
        is >> im; // optional imaginary part
        std::string rest;
        if (is >> rest)
            throw std::runtime_error(path + ":" + std::to_string(ln) +
                                     ": trailing content '" + rest + "'");
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": non-finite sample");
        vals.emplace_back(re, im);
    }
    if (vals.size() < 2 || !power_of_two(static_cast<long long>(vals.size())))
        throw std::runtime_error(path + ": sample count " + std::to_string(vals.size()) +
                                 " is not a power of two >= 2");
    return vals;
}

/// Trigonometric interpolation onto n >= m points (both powers of two): pad
/// the spectrum, splitting the Nyquist coefficient symmetrically, and rescale
/// for the unitary transform pair.
std::vector<Cx> upsample_spectral(const std::vector<Cx>& v, std::size_t n) {
    const std::size_t m = v.size();
    if (n == m) return v;
    if (n < m || n % m != 0)
        throw std::invalid_argument("datum file holds " + std::to_string(m) +
                                    " samples but the reference grid has only " +
                                    std::to_string(n));
    auto a = fft_forward(v);
    std::vector<Cx> b(n, Cx(0.0, 0.0));
    for (std::size_t j = 0; j < m / 2; ++j) b[j] = a[j];
    for (std::size_t j = m / 2 + 1; j < m; ++j) b[n - m + j] = a[j];
    b[m / 2] = 0.5 * a[m / 2];
    b[n - m / 2] += 0.5 * a[m / 2];
    auto u = fft_inverse(b);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
    for (auto& z : u) z *= scale;
    return u;
}

} // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

DatumSpec DatumSpec::gaussian(double width, double center, double amplitude) {
    DatumSpec d;
    d.kind = Kind::Gaussian;
    d.width = width;
    d.center = center;
    d.amplitude = amplitude;
    return d;
}

DatumSpec DatumSpec::sech(double width, double center) {
    DatumSpec d;
    d.kind = Kind::Sech;
    d.width = width;
    d.center = center;
    return d;
}

DatumSpec DatumSpec::modulated(DatumSpec base, double kappa) {
    base.modulation = kappa;
    return base;
}

DatumSpec DatumSpec::from_file(std::string path) {
    DatumSpec d;
    d.kind = Kind::File;
    d.path = std::move(path);
    return d;
}

void DatumSpec::validate() const {
    if (!std::isfinite(modulation)) throw std::invalid_argument("datum: non-finite modulation");
    if (kind == Kind::File) {
        if (path.empty()) throw std::invalid_argument("datum: file kind requires a path");
        return;
    }
    if (!(width > 0.0) || !std::isfinite(width))
        throw std::invalid_argument("datum: width must be a positive real");
    if (!std::isfinite(center)) throw std::invalid_argument("datum: non-finite center");
    if (kind == Kind::Gaussian && !std::isfinite(amplitude))
        throw std::invalid_argument("datum: non-finite amplitude");
}

ContinuumFunction sample_datum(const DatumSpec& spec, const PeriodicLattice& fine_grid) {
    spec.validate();
    std::vector<Cx> vals;
    switch (spec.kind) {
        case DatumSpec::Kind::Gaussian:
            vals.resize(fine_grid.n_sites);
            for (std::size_t m = 0; m < fine_grid.n_sites; ++m) {
                const double r = (fine_grid.site(m) - spec.center) / spec.width;
                vals[m] = Cx(spec.amplitude * std::exp(-r * r), 0.0);
            }
            break;
        case DatumSpec::Kind::Sech:
            vals.resize(fine_grid.n_sites);
            for (std::size_t m = 0; m < fine_grid.n_sites; ++m) {
                const double r = (fine_grid.site(m) - spec.center) / spec.width;
                vals[m] = Cx(1.0 / std::cosh(r), 0.0);
            }
            break;
        case DatumSpec::Kind::File:
            vals = upsample_spectral(read_datum_file(spec.path), fine_grid.n_sites);
            break;
    }
    if (spec.modulation != 0.0)
        for (std::size_t m = 0; m < fine_grid.n_sites; ++m)
            vals[m] *= std::polar(1.0, spec.modulation * fine_grid.site(m));
    const Provenance prov = spec.kind == DatumSpec::Kind::File ? Provenance::Interpolated
                                                               : Provenance::ClosedForm;
    return ContinuumFunction(fine_grid, std::move(vals), prov);
}

void ExperimentConfig::validate() const {
    build_kernel(kernel); // surfaces bad kernel parameters early
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw std::invalid_argument("config: box_length must be a positive real");
    if (h_ladder.empty()) throw std::invalid_argument("config: empty h_ladder");
    for (std::size_t i = 0; i < h_ladder.size(); ++i) {
        const double h = h_ladder[i];
        if (!(h > 0.0) || !(h < 1.0))
            throw std::invalid_argument("config: ladder mesh h = " + fmt(h) +
                                        " must lie in (0, 1)");
        if (i > 0 && !(h < h_ladder[i - 1]))
            throw std::invalid_argument("config: h_ladder must be strictly descending");
        sites_for(box_length, h);
    }
    datum.validate();
    for (const auto& t : test_functions) t.validate();
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("config: t_final must be a positive real");
    if (!(dt > 0.0) || !std::isfinite(dt) || dt > t_final)
        throw std::invalid_argument("config: dt must lie in (0, t_final]");
    if (samples < 2) throw std::invalid_argument("config: samples must be >= 2");
    if (std::llround(t_final / dt) < static_cast<long long>(samples) - 1)
        throw std::invalid_argument("config: fewer steps than requested samples");
    if (!power_of_two(static_cast<long long>(reference_refine)))
        throw std::invalid_argument("config: reference_refine must be a power of two >= 2");
    if (reference_dt_refine < 1)
        throw std::invalid_argument("config: reference_dt_refine must be >= 1");
    if (output_dir.empty()) throw std::invalid_argument("config: empty output_dir");
}

// ---------------------------------------------------------------------------
// continuum-limit experiment

ExperimentResult run_continuum_limit(const ExperimentConfig& config) {
    config.validate();
    const Kernel kernel = build_kernel(config.kernel);
    const ScalingClass scaling = scaling_class(kernel); // rejects class_s <= 1/2
    const double c = limit_constant_c(kernel);

    const double h_min = config.h_ladder.back();
    const double h_ref = h_min / static_cast<double>(config.reference_refine);
    const PeriodicLattice fine(h_ref, sites_for(config.box_length, h_ref));

    const ContinuumFunction datum = sample_datum(config.datum, fine);
    std::vector<ContinuumFunction> tests;
    tests.reserve(config.test_functions.size());
    for (const auto& t : config.test_functions) tests.push_back(sample_datum(t, fine));

    // Equal segments of whole steps between report times; the reference runs
    // the same segments with a 1/reference_dt_refine step.
    const long long total_steps = std::max<long long>(1, std::llround(config.t_final / config.dt));
    const std::size_t n_seg = config.samples - 1;
    std::vector<long long> seg_steps(n_seg, total_steps / static_cast<long long>(n_seg));
    for (std::size_t i = 0; i < static_cast<std::size_t>(total_steps % n_seg); ++i)
        seg_steps[i] += 1;
    std::vector<double> report_times(config.samples, 0.0);
    for (std::size_t i = 0; i < n_seg; ++i)
        report_times[i + 1] =
            report_times[i] + static_cast<double>(seg_steps[i]) * config.dt;

    const std::size_t never = std::numeric_limits<std::size_t>::max();

    std::vector<ContinuumFunction> refs;
    refs.reserve(config.samples);
    refs.push_back(datum);
    {
        ContinuumFunction u = datum;
        for (std::size_t i = 0; i < n_seg; ++i) {
            EvolutionConfig ec;
            ec.dt = config.dt / static_cast<double>(config.reference_dt_refine);
            ec.t_final = static_cast<double>(seg_steps[i]) * config.dt;
            ec.sign = config.sign;
            ec.record_every = never;
            const Trajectory tr = evolve_continuum(u, scaling.alpha, c, ec);
            u = tr.cstates.back();
            refs.push_back(u);
        }
    }

    std::vector<std::vector<ReportRow>> per_h(config.h_ladder.size());
    parallel_run(config.h_ladder.size(), [&](std::size_t ih) {
        const double h = config.h_ladder[ih];
        try {
            const PeriodicLattice lat(h, sites_for(config.box_length, h));
            LatticeField u = discretize(datum, lat);
            const double mass0 = discrete_mass(u);
            const double energy0 = discrete_energy(u, kernel, config.sign);
            for (std::size_t i = 0; i < config.samples; ++i) {
                if (i > 0) {
                    EvolutionConfig ec;
                    ec.dt = config.dt;
                    ec.t_final = static_cast<double>(seg_steps[i - 1]) * config.dt;
                    ec.sign = config.sign;
                    ec.record_every = never;
                    const Trajectory tr = evolve_discrete(u, kernel, ec);
                    u = tr.states.back();
                }
                ReportRow row;
                row.h = h;
                row.n_sites = lat.n_sites;
                row.t = report_times[i];
                const ContinuumFunction p = p_linear(u, fine);
                std::vector<Cx> d(fine.n_sites);
                for (std::size_t m = 0; m < fine.n_sites; ++m)
                    d[m] = p.samples[m] - refs[i].samples[m];
                const ContinuumFunction diff(fine, std::move(d), Provenance::Interpolated);
                // Interpolants carry genuine spectral tails; the aliasing
                // guard is for closed-form inputs, not these norms.
                row.l2_error = continuum_norm(diff, ContinuumNorm::l2(), kInf);
                for (const auto& w : tests)
                    row.weak_pairing_errors.push_back(std::abs(continuum_pairing(w, diff)));
                row.h_alpha_norm =
                    continuum_norm(p, ContinuumNorm::hsigma(scaling.alpha), kInf);
                row.mass_drift =
                    std::abs(discrete_mass(u) - mass0) / std::max(mass0, 1e-300);
                row.energy_drift = std::abs(discrete_energy(u, kernel, config.sign) - energy0) /
                                   std::max(std::abs(energy0), 1e-300);
                per_h[ih].push_back(std::move(row));
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("h = " + fmt(h) + ": " + e.what());
        }
    });

    ExperimentResult result;
    result.alpha = scaling.alpha;
    result.limit_c = c;
    for (const auto& rows_h : per_h)
        for (const auto& row : rows_h) result.rows.push_back(row);

    for (const auto& rows_h : per_h) {
        double sup = 0.0;
        for (const auto& row : rows_h) sup = std::max(sup, row.h_alpha_norm);
        result.sup_h_alpha.push_back(sup);
    }

    std::vector<double> final_l2;
    for (const auto& rows_h : per_h) final_l2.push_back(rows_h.back().l2_error);
    result.l2_slope = loglog_slope(config.h_ladder, final_l2);
    for (std::size_t p = 0; p < tests.size(); ++p) {
        std::vector<double> col;
        for (const auto& rows_h : per_h) col.push_back(rows_h.back().weak_pairing_errors[p]);
        result.pairing_slopes.push_back(loglog_slope(config.h_ladder, col));
    }

    if (config.h_ladder.size() >= 2) {
        for (std::size_t i = 0; i < config.samples; ++i) {
            auto monotone = [&](const std::function<double(const ReportRow&)>& get) {
                for (std::size_t ih = 1; ih < per_h.size(); ++ih)
                    if (!(get(per_h[ih][i]) < get(per_h[ih - 1][i]))) return false;
                return true;
            };
            if (!monotone([](const ReportRow& r) { return r.l2_error; }))
                result.warnings.push_back("l2_error not strictly decreasing along the ladder at t = " +
                                          fmt(report_times[i]));
            for (std::size_t p = 0; p < tests.size(); ++p)
                if (!monotone([p](const ReportRow& r) { return r.weak_pairing_errors[p]; }))
                    result.warnings.push_back("weak_pairing_" + std::to_string(p + 1) +
                                              " not strictly decreasing along the ladder at t = " +
                                              fmt(report_times[i]));
        }
    }

    fs::create_directories(config.output_dir);
    result.csv_path = (fs::path(config.output_dir) / "continuum_limit.csv").string();
    emit_report(result.rows, result.csv_path);

    std::ostringstream os;
    os << "continuum limit: kernel = " << describe_kernel(config.kernel)
       << ", alpha = " << fmt(result.alpha) << ", c = " << fmt(result.limit_c) << "\n";
    os << "box L = " << fmt(config.box_length) << ", T = " << fmt(config.t_final)
       << ", dt = " << fmt(config.dt) << ", reference mesh = " << fmt(h_ref)
       << " (N = " << fine.n_sites << ")\n";
    for (std::size_t ih = 0; ih < per_h.size(); ++ih) {
        os << "h = " << fmt(config.h_ladder[ih]) << " (N = " << per_h[ih].front().n_sites
           << "): l2(T) = " << fmt(final_l2[ih])
           << ", sup_t H^alpha = " << fmt(result.sup_h_alpha[ih]) << "\n";
    }
    os << "fitted slopes at t = T: l2 = " << fmt(result.l2_slope);
    for (std::size_t p = 0; p < result.pairing_slopes.size(); ++p)
        os << ", pairing_" << (p + 1) << " = " << fmt(result.pairing_slopes[p]);
    os << "\n";
    if (result.warnings.empty()) {
        os << "warnings: none\n";
    } else {
        for (const auto& w : result.warnings) os << "warning: " << w << "\n";
    }
    result.summary = os.str();
    return result;
}

// ---------------------------------------------------------------------------
// check suite

SuiteResult run_check_suite(const std::vector<KernelSpec>& specs, std::uint64_t seed,
                            const std::string& output_dir, std::size_t field_count) {
    SuiteResult out;
    if (specs.empty()) {
        out.summary = summarize_reports({});
        return out;
    }
    fs::create_directories(output_dir);

    std::vector<double> mult_ladder, oplim_ladder, k_grid;
    for (int e = 4; e <= 10; ++e) mult_ladder.push_back(std::pow(2.0, -e));
    for (int e = 3; e <= 7; ++e) oplim_ladder.push_back(std::pow(2.0, -e));
    const double pi = std::acos(-1.0);
    for (int i = 1; i <= 256; ++i) k_grid.push_back(pi * i / 256.0);

    const PeriodicLattice phi_grid(16.0 / 8192.0, 8192);
    const ContinuumFunction phi = sample_closed_form(
        [](double x) { return Cx(std::exp(-(x - 8.0) * (x - 8.0)), 0.0); }, phi_grid);
    const PeriodicLattice pair_grid(0.125, 256);

    std::vector<std::vector<CheckReport>> per_kernel(specs.size());
    std::vector<std::string> csv_paths(specs.size());
    parallel_run(specs.size(), [&](std::size_t i) {
        const Kernel kernel = build_kernel(specs[i]);
        const std::string slug = kernel_slug(specs[i]);
        std::vector<CheckReport> local;
        local.push_back(check_symbol_asymptotics(kernel));
        local.push_back(check_multiplier_equivalence(kernel, mult_ladder, k_grid));
        local.push_back(check_operator_limit(kernel, phi, oplim_ladder));
        {
            double worst = 0.0;
            bool all = true;
            for (std::uint64_t p = 0; p < 50; ++p) {
                const LatticeField w =
                    spectral_random_field(pair_grid, 1.5, seed * 1000 + 2 * p);
                const LatticeField u =
                    spectral_random_field(pair_grid, 1.5, seed * 1000 + 2 * p + 1);
                const CheckReport rep = check_integration_by_parts(w, u, kernel);
                worst = std::max(worst, rep.measured[0]);
                all = all && rep.pass;
            }
            CheckReport agg;
            agg.name = "integration_by_parts";
            agg.measured = {worst};
            agg.pass = all;
            agg.tolerance = 1e-11;
            agg.detail = "max relative defect over 50 seeded pairs = " + fmt(worst);
            local.push_back(std::move(agg));
        }
        {
            FieldFamily family;
            family.seed = seed;
            family.count = field_count;
            local.push_back(check_uniform_inequalities(family, mult_ladder, kernel));
        }
        for (auto& rep : local) rep.name = slug + "/" + rep.name;
        const std::string path = (fs::path(output_dir) / ("checks_" + slug + ".csv")).string();
        save_check_reports_csv(local, path);
        per_kernel[i] = std::move(local);
        csv_paths[i] = path;
    });

    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (auto& rep : per_kernel[i]) out.reports.push_back(std::move(rep));
        out.csv_paths.push_back(csv_paths[i]);
    }
    {
        FieldFamily family;
        family.seed = seed;
        family.count = field_count;
        std::vector<CheckReport> shared{check_interpolation_bounds(family, mult_ladder)};
        const std::string path = (fs::path(output_dir) / "checks_interpolation.csv").string();
        save_check_reports_csv(shared, path);
        out.reports.push_back(std::move(shared.front()));
        out.csv_paths.push_back(path);
    }

    out.all_pass = true;
    for (const auto& rep : out.reports) out.all_pass = out.all_pass && rep.pass;
    out.summary = summarize_reports(out.reports);
    return out;
}

// ---------------------------------------------------------------------------
// config file format

namespace {

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
    bool used = false;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
    bool used = false;
};

struct IniFile {
    std::string path;
    std::vector<IniSection> sections;
};

[[noreturn]] void fail_at(const IniFile& ini, int line, const std::string& msg) {
    throw std::runtime_error(ini.path + ":" + std::to_string(line) + ": " + msg);
}

IniFile read_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    IniFile ini;
    ini.path = path;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_at(ini, ln, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail_at(ini, ln, "empty section name");
            for (const auto& s : ini.sections)
                if (s.name == name) fail_at(ini, ln, "duplicate section [" + name + "]");
            ini.sections.push_back(IniSection{name, ln, {}, false});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_at(ini, ln, "expected 'key = value' or '[section]', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(ini, ln, "empty key");
        if (value.empty()) fail_at(ini, ln, "empty value for key '" + key + "'");
        if (ini.sections.empty()) fail_at(ini, ln, "key '" + key + "' outside any section");
        for (const auto& e : ini.sections.back().entries)
            if (e.key == key)
                fail_at(ini, ln, "duplicate key '" + key + "' in [" + ini.sections.back().name + "]");
        ini.sections.back().entries.push_back(IniEntry{key, value, ln, false});
    }
    return ini;
}

IniSection* find_section(IniFile& ini, const std::string& name) {
    for (auto& s : ini.sections)
        if (s.name == name) {
            s.used = true;
            return &s;
        }
    return nullptr;
}

IniSection& require_section(IniFile& ini, const std::string& name) {
    IniSection* s = find_section(ini, name);
    if (!s) throw std::runtime_error(ini.path + ": missing [" + name + "] section");
    return *s;
}

IniEntry* find_entry(IniSection& sec, const std::string& key) {
    for (auto& e : sec.entries)
        if (e.key == key) {
            e.used = true;
            return &e;
        }
    return nullptr;
}

IniEntry& require_entry(const IniFile& ini, IniSection& sec, const std::string& key) {
    IniEntry* e = find_entry(sec, key);
    if (!e) fail_at(ini, sec.line, "[" + sec.name + "] is missing key '" + key + "'");
    return *e;
}

double parse_number(const IniFile& ini, const IniEntry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        fail_at(ini, e.line, "invalid number '" + e.value + "' for key '" + e.key + "'");
    return v;
}

std::uint64_t parse_unsigned(const IniFile& ini, const IniEntry& e) {
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        fail_at(ini, e.line, "invalid integer '" + e.value + "' for key '" + e.key + "'");
    return v;
}

std::vector<double> parse_number_list(const IniFile& ini, const IniEntry& e) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(e.value);
    while (std::getline(is, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) fail_at(ini, e.line, "empty list item for key '" + e.key + "'");
        double v = 0.0;
        auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size())
            fail_at(ini, e.line, "invalid number '" + t + "' in list '" + e.key + "'");
        out.push_back(v);
    }
    if (out.empty()) fail_at(ini, e.line, "empty list for key '" + e.key + "'");
    return out;
}

DatumSpec parse_datum_section(const IniFile& ini, IniSection& sec) {
    const IniEntry& type = require_entry(ini, sec, "type");
    DatumSpec d;
    if (type.value == "gaussian") {
        d.kind = DatumSpec::Kind::Gaussian;
        d.width = parse_number(ini, require_entry(ini, sec, "width"));
        d.center = parse_number(ini, require_entry(ini, sec, "center"));
        if (IniEntry* a = find_entry(sec, "amplitude")) d.amplitude = parse_number(ini, *a);
    } else if (type.value == "sech") {
        d.kind = DatumSpec::Kind::Sech;
        d.width = parse_number(ini, require_entry(ini, sec, "width"));
        d.center = parse_number(ini, require_entry(ini, sec, "center"));
    } else if (type.value == "file") {
        d.kind = DatumSpec::Kind::File;
        d.path = require_entry(ini, sec, "path").value;
    } else {
        fail_at(ini, type.line,
                "datum type must be gaussian, sech or file, got '" + type.value + "'");
    }
    if (IniEntry* m = find_entry(sec, "modulation")) d.modulation = parse_number(ini, *m);
    return d;
}

} // namespace

ExperimentConfig parse_config(const std::string& path) {
    IniFile ini = read_ini(path);
    ExperimentConfig config;

    IniSection& kernel = require_section(ini, "kernel");
    const IniEntry& ktype = require_entry(ini, kernel, "type");
    if (ktype.value == "pure_power") {
        config.kernel = KernelSpec::pure_power(parse_number(ini, require_entry(ini, kernel, "s")));
    } else if (ktype.value == "nearest_neighbor") {
        config.kernel = KernelSpec::nearest_neighbor();
    } else if (ktype.value == "exponential") {
        config.kernel =
            KernelSpec::exponential(parse_number(ini, require_entry(ini, kernel, "rate")));
    } else if (ktype.value == "table") {
        std::vector<double> values = parse_number_list(ini, require_entry(ini, kernel, "values"));
        double cls = std::numeric_limits<double>::infinity();
        if (IniEntry* c = find_entry(kernel, "class_s")) cls = parse_number(ini, *c);
        config.kernel = KernelSpec::table(std::move(values), cls);
    } else {
        fail_at(ini, ktype.line,
                "kernel type must be pure_power, nearest_neighbor, exponential or table, got '" +
                    ktype.value + "'");
    }

    IniSection& grid = require_section(ini, "grid");
    config.box_length = parse_number(ini, require_entry(ini, grid, "box_length"));
    config.h_ladder = parse_number_list(ini, require_entry(ini, grid, "h_ladder"));

    config.datum = parse_datum_section(ini, require_section(ini, "datum"));

    IniSection& evolution = require_section(ini, "evolution");
    const IniEntry& sign = require_entry(ini, evolution, "sign");
    if (sign.value == "focusing") {
        config.sign = Sign::Focusing;
    } else if (sign.value == "defocusing") {
        config.sign = Sign::Defocusing;
    } else {
        fail_at(ini, sign.line, "sign must be focusing or defocusing, got '" + sign.value + "'");
    }
    config.t_final = parse_number(ini, require_entry(ini, evolution, "t_final"));
    config.dt = parse_number(ini, require_entry(ini, evolution, "dt"));
    if (IniEntry* s = find_entry(evolution, "samples")) {
        const std::uint64_t v = parse_unsigned(ini, *s);
        config.samples = static_cast<std::size_t>(v);
    }

    for (std::size_t want = 1;; ++want) {
        IniSection* sec = nullptr;
        for (auto& s : ini.sections)
            if (s.name == "test_function." + std::to_string(want)) sec = &s;
        if (!sec) break;
        sec->used = true;
        config.test_functions.push_back(parse_datum_section(ini, *sec));
    }

    if (IniSection* output = find_section(ini, "output"))
        config.output_dir = require_entry(ini, *output, "dir").value;
    if (IniSection* random = find_section(ini, "random"))
        config.seed = parse_unsigned(ini, require_entry(ini, *random, "seed"));

    for (const auto& sec : ini.sections) {
        if (!sec.used) fail_at(ini, sec.line, "unknown section [" + sec.name + "]");
        for (const auto& e : sec.entries)
            if (!e.used)
                fail_at(ini, e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
    }

    try {
        config.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return config;
}

std::string emit_config(const ExperimentConfig& config) {
    std::ostringstream os;
    os << "# latnls experiment config v1\n";
    os << "[kernel]\n";
    switch (config.kernel.family) {
        case KernelFamily::PurePower:
            os << "type = pure_power\n" << "s = " << fmt(config.kernel.s) << "\n";
            break;
        case KernelFamily::NearestNeighbor:
            os << "type = nearest_neighbor\n";
            break;
        case KernelFamily::Exponential:
            os << "type = exponential\n" << "rate = " << fmt(config.kernel.rate) << "\n";
            break;
        case KernelFamily::Table: {
            os << "type = table\n" << "values = ";
            for (std::size_t i = 0; i < config.kernel.values.size(); ++i)
                os << (i ? ", " : "") << fmt(config.kernel.values[i]);
            os << "\n" << "class_s = " << fmt(config.kernel.declared_class) << "\n";
            break;
        }
    }
    os << "\n[grid]\n";
    os << "box_length = " << fmt(config.box_length) << "\n";
    os << "h_ladder = ";
    for (std::size_t i = 0; i < config.h_ladder.size(); ++i)
        os << (i ? ", " : "") << fmt(config.h_ladder[i]);
    os << "\n";

    auto emit_datum = [&os](const DatumSpec& d) {
        switch (d.kind) {
            case DatumSpec::Kind::Gaussian:
                os << "type = gaussian\n";
                os << "width = " << fmt(d.width) << "\n";
                os << "center = " << fmt(d.center) << "\n";
                os << "amplitude = " << fmt(d.amplitude) << "\n";
                break;
            case DatumSpec::Kind::Sech:
                os << "type = sech\n";
                os << "width = " << fmt(d.width) << "\n";
                os << "center = " << fmt(d.center) << "\n";
                break;
            case DatumSpec::Kind::File:
                os << "type = file\n";
                os << "path = " << d.path << "\n";
                break;
        }
        os << "modulation = " << fmt(d.modulation) << "\n";
    };
    os << "\n[datum]\n";
    emit_datum(config.datum);

    os << "\n[evolution]\n";
    os << "sign = " << (config.sign == Sign::Focusing ? "focusing" : "defocusing") << "\n";
    os << "t_final = " << fmt(config.t_final) << "\n";
    os << "dt = " << fmt(config.dt) << "\n";
    os << "samples = " << config.samples << "\n";

    for (std::size_t i = 0; i < config.test_functions.size(); ++i) {
        os << "\n[test_function." << (i + 1) << "]\n";
        emit_datum(config.test_functions[i]);
    }

    os << "\n[output]\n" << "dir = " << config.output_dir << "\n";
    os << "\n[random]\n" << "seed = " << config.seed << "\n";
    return os.str();
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& path) {
    const std::size_t pairings = rows.empty() ? 0 : rows.front().weak_pairing_errors.size();
    for (const auto& r : rows) {
        if (r.weak_pairing_errors.size() != pairings)
            throw std::invalid_argument("emit_report: ragged weak_pairing_errors");
        const bool finite = std::isfinite(r.h) && std::isfinite(r.t) &&
                            std::isfinite(r.l2_error) && std::isfinite(r.h_alpha_norm) &&
                            std::isfinite(r.mass_drift) && std::isfinite(r.energy_drift) &&
                            std::all_of(r.weak_pairing_errors.begin(),
                                        r.weak_pairing_errors.end(),
                                        [](double v) { return std::isfinite(v); });
        if (!finite) throw std::invalid_argument("emit_report: non-finite entry");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_report: cannot write " + path);
    out << "# continuum_limit v1\n";
    out << "h,n_sites,t,l2_error";
    for (std::size_t p = 0; p < pairings; ++p) out << ",weak_pairing_" << (p + 1);
    out << ",h_alpha_norm,mass_drift,energy_drift\n";
    for (const auto& r : rows) {
        out << fmt(r.h) << ',' << r.n_sites << ',' << fmt(r.t) << ',' << fmt(r.l2_error);
        for (double v : r.weak_pairing_errors) out << ',' << fmt(v);
        out << ',' << fmt(r.h_alpha_norm) << ',' << fmt(r.mass_drift) << ','
            << fmt(r.energy_drift) << "\n";
    }
    out.flush();
    if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

} // namespace latnls
