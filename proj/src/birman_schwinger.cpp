#include "nlsgap/birman_schwinger.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsgap {

BSOperator make_bs_operator(const RealField& phi, double beta, BSKind kind,
                            SharedGreen green) {
    if (!green) throw std::invalid_argument("make_bs_operator: null Green weights");
    if (!(phi.grid == green->grid))
        throw std::invalid_argument("make_bs_operator: soliton and Green weights on different grids");
    if (!(beta > 0.0))
        throw std::invalid_argument("make_bs_operator: beta must be positive");

    BSOperator op;
    op.beta = beta;
    op.scale = kind == BSKind::plus ? 2.0 * beta + 1.0 : 1.0;
    op.green = std::move(green);
    op.U = make_field(phi.grid);
    for (std::size_t i = 0; i < phi.samples.size(); ++i) {
        const double v = phi.samples[i];
        if (v < 0.0)
            throw std::invalid_argument(
                "make_bs_operator: negative soliton samples (profile did not "
                "converge to the ground state)");
        op.U.samples[i] = std::pow(v, beta);
    }
    return op;
}

RealField apply_bs(const BSOperator& op, const RealField& f) {
    if (!(f.grid == op.U.grid))
        throw std::invalid_argument("apply_bs: grid mismatch");
    RealField uf = make_field(f.grid);
    for (std::size_t i = 0; i < f.samples.size(); ++i)
        uf.samples[i] = op.U.samples[i] * f.samples[i];
    Spectrum F = fft3(uf);
    for (std::size_t i = 0; i < F.coeffs.size(); ++i)
        F.coeffs[i] *= op.green->spectrum.coeffs[i];
    RealField out = ifft3(F);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] *= op.scale * op.U.samples[i];
    return out;
}

}  // namespace nlsgap
