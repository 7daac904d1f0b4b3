#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nlsgap {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Cubic periodic box of side L sampled N times per axis, spacing h = L/N.
// Samples live at x_j = j*h for signed indices -N/2 <= j <= N/2-1 and are
// stored in FFT wrap-around order: linear axis index a in [0, N) maps to
// j(a) = a < N/2 ? a : a - N, so the origin sits at linear index 0.
// Layout is row-major over (a1, a2, a3) with a3 fastest.
struct GridSpec {
    double L = 0.0;
    int N = 0;

    double h() const { return L / N; }
    std::size_t size() const { return static_cast<std::size_t>(N) * N * N; }

    int j_of(int a) const { return a < N / 2 ? a : a - N; }
    double x_of(int a) const { return j_of(a) * h(); }
    double xi_of(int a) const { return 2.0 * pi * j_of(a) / L; }

    std::size_t lin(int a1, int a2, int a3) const {
        return (static_cast<std::size_t>(a1) * N + a2) * N + a3;
    }
    // wraps a signed or out-of-range axis index back into [0, N)
    int wrap(int a) const { return ((a % N) + N) % N; }

    bool operator==(const GridSpec&) const = default;
};

// Throws std::invalid_argument unless L > 0, N even, N >= 4 and L <= N.
// The L <= N bound rejects boxes so underresolved (h > 1) that the soliton
// iteration is known to misbehave.
GridSpec make_grid(double L, int N);

struct RealField {
    GridSpec grid;
    std::vector<double> samples;
};

struct Spectrum {
    GridSpec grid;
    std::vector<std::complex<double>> coeffs;
};

// Zero-initialized field on the given grid.
RealField make_field(const GridSpec& grid);

// Samples f(x) at every node; F takes (x1, x2, x3).
template <class F>
RealField sample_field(const GridSpec& grid, F&& f) {
    RealField out = make_field(grid);
    std::size_t idx = 0;
    for (int a1 = 0; a1 < grid.N; ++a1)
        for (int a2 = 0; a2 < grid.N; ++a2)
            for (int a3 = 0; a3 < grid.N; ++a3, ++idx)
                out.samples[idx] = f(grid.x_of(a1), grid.x_of(a2), grid.x_of(a3));
    return out;
}

// Unnormalized forward DFT; ifft3 carries the 1/N^3 factor, so
// ifft3(fft3(f)) == f. ifft3 returns the real part (inputs with conjugate
// symmetry produce imaginary parts at round-off level only).
Spectrum fft3(const RealField& f);
RealField ifft3(const Spectrum& F);

// d/dx_axis via multiplication by i*xi in frequency space, axis in {1,2,3}.
// The unmatched Nyquist mode k = -N/2 is zeroed to keep the output real.
RealField spectral_derivative(const RealField& f, int axis);

// Trapezoidal-on-torus inner product: h^3 * sum f g. l2_norm is its sqrt.
double inner_product(const RealField& f, const RealField& g);
double l2_norm(const RealField& f);

// Caps FFTW's internal thread count (default 1). Safe to call between
// transforms; existing cached plans are dropped.
void set_fft_threads(int n);

}  // namespace nlsgap
