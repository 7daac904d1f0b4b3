#include "nlsgap/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nlsgap {

GridSpec make_grid(double L, int N) {
    if (!(L > 0.0))
        throw std::invalid_argument("make_grid: box side L must be positive");
    if (N < 4 || N % 2 != 0)
        throw std::invalid_argument("make_grid: N must be even and at least 4");
    if (L > static_cast<double>(N))
        throw std::invalid_argument(
            "make_grid: L > N gives spacing h > 1; this regime is known to "
            "break the soliton iteration");
    return GridSpec{L, N};
}

RealField make_field(const GridSpec& grid) {
    return RealField{grid, std::vector<double>(grid.size(), 0.0)};
}

namespace {

// One cached plan pair per N. Plans are created with FFTW_ESTIMATE (plan
// choice must not depend on runtime measurement, or identical runs could
// round differently) and FFTW_UNALIGNED so they apply to any buffer.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}
int fft_threads = 1;
bool threads_ready = false;

PlanPair get_plans(int N) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;

#ifdef NLSGAP_HAVE_FFTW_THREADS
    if (!threads_ready) {
        fftw_init_threads();
        threads_ready = true;
    }
    fftw_plan_with_nthreads(fft_threads);
#else
    (void)threads_ready;
#endif
    std::vector<std::complex<double>> probe(static_cast<std::size_t>(N) * N * N);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    PlanPair plans;
    plans.fwd = fftw_plan_dft_3d(N, N, N, p, p, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.bwd = fftw_plan_dft_3d(N, N, N, p, p, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[N] = plans;
    return plans;
}

}  // namespace

void set_fft_threads(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fft_threads = n < 1 ? 1 : n;
    for (auto& [N, plans] : plan_cache()) {
        fftw_destroy_plan(plans.fwd);
        fftw_destroy_plan(plans.bwd);
    }
    plan_cache().clear();
}

Spectrum fft3(const RealField& f) {
    Spectrum out{f.grid, std::vector<std::complex<double>>(f.grid.size())};
    for (std::size_t i = 0; i < f.samples.size(); ++i) out.coeffs[i] = f.samples[i];
    auto plans = get_plans(f.grid.N);
    auto* p = reinterpret_cast<fftw_complex*>(out.coeffs.data());
    fftw_execute_dft(plans.fwd, p, p);
    return out;
}

RealField ifft3(const Spectrum& F) {
    std::vector<std::complex<double>> buf = F.coeffs;
    auto plans = get_plans(F.grid.N);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans.bwd, p, p);
    RealField out = make_field(F.grid);
    const double inv = 1.0 / static_cast<double>(F.grid.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out.samples[i] = buf[i].real() * inv;
    return out;
}

RealField spectral_derivative(const RealField& f, int axis) {
    if (axis < 1 || axis > 3)
        throw std::invalid_argument("spectral_derivative: axis must be 1, 2 or 3");
    Spectrum F = fft3(f);
    const GridSpec& g = f.grid;
    std::size_t idx = 0;
    for (int a1 = 0; a1 < g.N; ++a1)
        for (int a2 = 0; a2 < g.N; ++a2)
            for (int a3 = 0; a3 < g.N; ++a3, ++idx) {
                int a = axis == 1 ? a1 : axis == 2 ? a2 : a3;
                if (a == g.N / 2) {  // unmatched Nyquist mode
                    F.coeffs[idx] = 0.0;
                    continue;
                }
                F.coeffs[idx] *= std::complex<double>(0.0, g.xi_of(a));
            }
    return ifft3(F);
}

double inner_product(const RealField& f, const RealField& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("inner_product: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.samples.size(); ++i) s += f.samples[i] * g.samples[i];
    const double h = f.grid.h();
    return h * h * h * s;
}

double l2_norm(const RealField& f) { return std::sqrt(inner_product(f, f)); }

}  // namespace nlsgap
