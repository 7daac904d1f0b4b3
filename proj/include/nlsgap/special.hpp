#pragma once

#include <memory>

#include "nlsgap/grid.hpp"

namespace nlsgap {

// Sine integral Si(x) = int_0^x sin(t)/t dt, accurate to ~1e-15 scaled error
// across [0, inf). Negative arguments use oddness; NaN throws.
double sine_integral(double x);

// Quadrature weights for the free-space 1/(4*pi*|x|) kernel on the grid:
//   w(x_j) = h^3 * Si(pi*N*|x_j|/L) / (2*pi^2*|x_j|)   for x_j != 0,
//   w(0)   = h^2 / (2*pi),
// which is the x -> 0 limit of the first branch. The volume factor h^3 is
// folded in, so applying the kernel is a plain circular convolution.
// `spectrum` caches the DFT of the weights for that convolution.
struct GreenWeights {
    GridSpec grid;
    RealField weights;
    Spectrum spectrum;
};

GreenWeights greens_weights(const GridSpec& grid);

// (-Laplace)^{-1} f by circular convolution with the Green weights, computed
// as ifft3(spectrum * fft3(f)). Exact for decaying band-limited inputs up to
// box-truncation error.
RealField apply_inverse_laplacian(const RealField& f, const GreenWeights& green);

using SharedGreen = std::shared_ptr<const GreenWeights>;

inline SharedGreen make_shared_green(const GridSpec& grid) {
    return std::make_shared<const GreenWeights>(greens_weights(grid));
}

}  // namespace nlsgap
