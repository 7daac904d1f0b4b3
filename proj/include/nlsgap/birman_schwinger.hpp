#pragma once

#include "nlsgap/grid.hpp"
#include "nlsgap/special.hpp"

namespace nlsgap {

enum class BSKind { minus, plus };

// Matrix-free operator scale * U (-Lap)^{-1} U with U = phi^beta.
// The minus kind has scale 1, the plus kind scale 2*beta + 1; they differ by
// exactly that scalar. Immutable after construction; the Green weights are
// shared, read-only.
struct BSOperator {
    RealField U;
    SharedGreen green;
    double scale = 1.0;
    double beta = 1.0;
};

// Builds U = phi^beta pointwise. Rejects negative phi samples (an unconverged
// or spurious profile) and grid mismatches.
BSOperator make_bs_operator(const RealField& phi, double beta, BSKind kind,
                            SharedGreen green);

// scale * U . ifft3(Ghat . fft3(U . f)); two transforms per application.
RealField apply_bs(const BSOperator& op, const RealField& f);

}  // namespace nlsgap
