#include "CLI11.hpp"

#include "latnls/experiment.hpp"
#include "latnls/kernel.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace latnls;

namespace {

// "pure_power:0.75" | "nearest_neighbor" | "exponential:0.5"
KernelSpec parse_kernel_arg(const std::string& arg) {
    std::string name = arg;
    std::string param;
    if (auto colon = arg.find(':'); colon != std::string::npos) {
        name = arg.substr(0, colon);
        param = arg.substr(colon + 1);
    }
    auto number = [&](const char* what) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(param.data(), param.data() + param.size(), v);
        if (ec != std::errc() || p != param.data() + param.size())
            throw CLI::ValidationError("--kernel", "invalid " + std::string(what) + " '" +
                                                       param + "' in '" + arg + "'");
        return v;
    };
    if (name == "pure_power") return KernelSpec::pure_power(number("exponent"));
    if (name == "nearest_neighbor") {
        if (!param.empty())
            throw CLI::ValidationError("--kernel", "nearest_neighbor takes no parameter");
        return KernelSpec::nearest_neighbor();
    }
    if (name == "exponential") return KernelSpec::exponential(number("rate"));
    throw CLI::ValidationError("--kernel", "unknown kernel '" + name +
                                               "' (expected pure_power:<s>, "
                                               "nearest_neighbor, exponential:<rate>)");
}

std::vector<KernelSpec> parse_kernel_list(const std::string& csv) {
    std::vector<KernelSpec> specs;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        std::string item = csv.substr(start, comma - start);
        const auto a = item.find_first_not_of(" \t");
        if (a != std::string::npos) {
            const auto b = item.find_last_not_of(" \t");
            specs.push_back(parse_kernel_arg(item.substr(a, b - a + 1)));
        }
        start = comma + 1;
    }
    if (specs.empty()) throw CLI::ValidationError("--kernels", "empty kernel list");
    return specs;
}

// Precedence: LATNLS_OUT > --out > config/default.
std::string resolve_out_dir(const std::string& flag_value, const std::string& fallback) {
    if (const char* env = std::getenv("LATNLS_OUT"); env && *env) return env;
    if (!flag_value.empty()) return flag_value;
    return fallback;
}

int run_limit(const std::string& config_path, const std::string& out_flag, long long seed,
              bool seed_set) {
    ExperimentConfig config = parse_config(config_path);
    if (seed_set) config.seed = static_cast<std::uint64_t>(seed);
    config.output_dir = resolve_out_dir(out_flag, config.output_dir);

    ExperimentResult result = run_continuum_limit(config);

    // Keep the normalized config next to the data so a run is reproducible
    // from its artifacts alone.
    const auto config_copy = std::filesystem::path(config.output_dir) / "config_used.ini";
    std::ofstream out(config_copy, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + config_copy.string());
    out << emit_config(config);

    std::cout << result.summary;
    std::cout << "report: " << result.csv_path << "\n";
    std::cout << "config: " << config_copy.string() << "\n";
    return 0;
}

int run_check(const std::string& kernels_csv, const std::string& out_flag, long long seed) {
    const std::vector<KernelSpec> specs = parse_kernel_list(kernels_csv);
    const std::string out_dir = resolve_out_dir(out_flag, ".");
    SuiteResult result = run_check_suite(specs, static_cast<std::uint64_t>(seed), out_dir);
    std::cout << result.summary;
    for (const auto& p : result.csv_paths) std::cout << "report: " << p << "\n";
    return result.all_pass ? 0 : 1;
}

std::string describe_kernel(const KernelSpec& spec) {
    switch (spec.family) {
    case KernelFamily::PurePower: return "pure_power (s = " + std::to_string(spec.s) + ")";
    case KernelFamily::NearestNeighbor: return "nearest_neighbor";
    case KernelFamily::Exponential:
        return "exponential (rate = " + std::to_string(spec.rate) + ")";
    case KernelFamily::Table:
        return "table (" + std::to_string(spec.values.size()) + " couplings)";
    }
    return "?";
}

int run_symbol(const std::string& kernel_arg, double kmin, double kmax, unsigned points,
               const std::string& out_flag) {
    if (!(kmin > 0.0) || !(kmax > kmin) || kmax > 3.2)
        throw CLI::ValidationError("--kmin/--kmax", "need 0 < kmin < kmax <= pi");
    if (points < 2) throw CLI::ValidationError("--points", "need at least 2 points");

    const KernelSpec spec = parse_kernel_arg(kernel_arg);
    const Kernel kernel = build_kernel(spec);
    const ScalingClass sc = scaling_class(kernel);
    const double c = limit_constant_c(kernel);
    if (sc.regime == Regime::Log && kmax >= 1.0)
        throw CLI::ValidationError(
            "--kmax", "the logarithmic scaling (-log k)k^2 needs kmax < 1 for this kernel");

    const std::string out_dir = resolve_out_dir(out_flag, ".");
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "symbol_table.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "# symbol_table v1\n";
    out << "k,omega,delta,omega_over_delta\n";
    for (unsigned i = 0; i < points; ++i) {
        const double t = double(i) / double(points - 1);
        const double k = kmin * std::pow(kmax / kmin, t);
        const double w = omega(kernel, k);
        const double d = delta(sc, k);
        out << k << ',' << w << ',' << d << ',' << w / d << '\n';
    }

    const char* regime_name = sc.regime == Regime::Sub1  ? "fractional"
                              : sc.regime == Regime::Log ? "logarithmic"
                                                         : "second-order";
    std::cout << "kernel:  " << describe_kernel(spec) << "\n"
              << "regime:  " << regime_name << " (alpha = " << sc.alpha << ")\n"
              << "c:       " << c << "\n"
              << "table:   " << path.string() << " (" << points << " points, k in ["
              << kmin << ", " << kmax << "])\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice NLS laboratory: long-range discrete NLS evolution, fractional "
                 "continuum limits, and operator/inequality check suites"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware default)")
        ->capture_default_str();

    auto* limit = app.add_subcommand("limit", "run a continuum-limit experiment from a config");
    limit->fallthrough();
    std::string config_path;
    std::string limit_out;
    long long limit_seed = 0;
    limit->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    limit->add_option("--out", limit_out, "output directory (overrides config)");
    auto* seed_opt = limit->add_option("--seed", limit_seed, "seed override");

    auto* check = app.add_subcommand("check", "run the operator/inequality check suite");
    check->fallthrough();
    std::string kernels_csv =
        "pure_power:0.75,pure_power:1.0,pure_power:1.5,nearest_neighbor";
    std::string check_out;
    long long check_seed = 1;
    check->add_option("--kernels", kernels_csv,
                      "comma-separated kernels (pure_power:<s>, nearest_neighbor, "
                      "exponential:<rate>)")
        ->capture_default_str();
    check->add_option("--out", check_out, "output directory");
    check->add_option("--seed", check_seed, "random seed")->capture_default_str();

    auto* symbol = app.add_subcommand("symbol", "tabulate a kernel symbol and its limit data");
    symbol->fallthrough();
    std::string symbol_kernel;
    std::string symbol_out;
    double kmin = 1e-4;
    double kmax = 3.141592653589793;
    unsigned points = 65;
    symbol->add_option("--kernel", symbol_kernel, "kernel (same grammar as check)")->required();
    symbol->add_option("--kmin", kmin, "smallest wavenumber")->capture_default_str();
    symbol->add_option("--kmax", kmax, "largest wavenumber")->capture_default_str();
    symbol->add_option("--points", points, "log-spaced sample count")->capture_default_str();
    symbol->add_option("--out", symbol_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        set_max_threads(threads);
        if (limit->parsed())
            return run_limit(config_path, limit_out, limit_seed, seed_opt->count() > 0);
        if (check->parsed()) return run_check(kernels_csv, check_out, check_seed);
        return run_symbol(symbol_kernel, kmin, kmax, points, symbol_out);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
