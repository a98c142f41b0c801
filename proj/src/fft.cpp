#include "latnls/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace latnls {
namespace {

// Planner access is serialized; execution through fftw_execute_dft is
// reentrant. Plans use FFTW_ESTIMATE so the algorithm choice (and hence the
// rounding pattern) is identical from run to run, and FFTW_UNALIGNED so they
// can execute on std::vector storage.
std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plan_cache;

fftw_plan plan_for(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    if (!in || !out) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (!p) throw std::runtime_error("fft: plan creation failed");
    plan_cache.emplace(key, p);
    return p;
}

std::vector<std::complex<double>> transform(const std::vector<std::complex<double>>& u,
                                            int sign) {
    if (u.empty()) throw std::invalid_argument("fft: empty input");
    const std::size_t n = u.size();
    fftw_plan p = plan_for(n, sign);
    std::vector<std::complex<double>> out(n);
    // std::complex<double> is layout-compatible with fftw_complex.
    auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(u.data()));
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(p, in_ptr, out_ptr);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& z : out) z *= scale;
    return out;
}

} // namespace

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& u) {
    return transform(u, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& u) {
    return transform(u, FFTW_BACKWARD);
}

} // namespace latnls
