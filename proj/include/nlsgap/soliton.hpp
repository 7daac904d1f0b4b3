#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlsgap/grid.hpp"

namespace nlsgap {

struct SolitonParams {
    double beta = 1.0;       // nonlinearity exponent, accepted range [2/3, 2]
    double tau = 1e-11;      // stop when the relative equation residual <= tau
    int max_iter = 500;
    double delta = -0.5;     // translation-damping constant; 0 = classical scheme
    bool use_aitken = true;
    double init_amplitude = 3.0;  // default start: amplitude * exp(-|x|^2 / width^2)
    double init_width = 1.0;
};

inline double gamma_exponent(double beta) { return (2.0 * beta + 1.0) / (2.0 * beta); }

enum class SolveStatus {
    converged,
    max_iterations,
    diverged,         // residual blew up past the divergence guard
    degenerate,       // iterate left the basin (M <= 0 or zero denominators)
    nonpositive_profile,  // converged, but to a profile with samples <= 0
};

struct SolitonResult {
    RealField phi;
    SolitonParams params;
    int iterations = 0;
    std::vector<double> residual_history;  // one row per iteration
    std::vector<double> M_history;
    std::vector<std::array<double, 3>> R_history;
    int aitken_accepted = 0;  // extrapolations that lowered the residual and were kept
    bool converged = false;
    SolveStatus status = SolveStatus::max_iterations;
    std::string diagnostic;
};

// Amplitude constant of one update: integrals of (1+|xi|^2) phihat^2 over
// phihat * Nhat, with N = |phi|^{2b} phi, computed as plain (unconjugated)
// products on the frequency lattice. For the origin-symmetric profiles the
// iteration produces this equals <phi,(1-Lap)phi>/<phi,N> by Parseval, and
// that equivalence is cross-checked on every call; a mismatch beyond 1e-12
// relative throws. Degenerate denominator (|.| < 1e-300) throws too.
double compute_M(const RealField& phi, double beta);

// Translation constant along `axis` in {1,2,3}: integrals of
// (1+|xi|^2) phihat * (d_axis phi)^ over (d_axis phi)^ * (d_axis N)^,
// plain products, Nyquist modes excluded. Vanishes (round-off) for even
// profiles; ~ -2a for a profile translated by small a. A vanishing
// denominator yields 0 with *degenerate set.
double compute_R(const RealField& phi, double beta, int axis,
                 bool* degenerate = nullptr);

// One full update: M^gamma (I-Lap)^{-1}(|phi|^{2b} phi) + delta * sum_j R_j d_j phi.
RealField petviashvili_step(const RealField& phi, const SolitonParams& params);

// Pointwise Aitken extrapolation of three successive iterates,
// f0 - (f1-f0)^2/(f2-2f1+f0), falling back to f2 wherever the denominator
// magnitude drops below 1e-14*(|f0|+1).
RealField aitken(const RealField& f0, const RealField& f1, const RealField& f2);

// || -Lap phi + phi - |phi|^{2b} phi || / ||phi||; +inf for the zero field.
double euler_lagrange_residual(const RealField& phi, double beta);

// Flags the runaway regime: once the residual has dipped below `arm`, growing
// past `factor` times the running minimum means the iteration is leaving the
// fixed point.
class DivergenceGuard {
  public:
    explicit DivergenceGuard(double arm = 1e-3, double factor = 10.0)
        : arm_(arm), factor_(factor) {}
    // Feed each iteration's residual; true = diverging, abort.
    bool update(double residual) {
        if (residual < arm_) armed_ = true;
        if (residual < run_min_) run_min_ = residual;
        return armed_ && residual > factor_ * run_min_;
    }

  private:
    double arm_, factor_;
    double run_min_ = 1e300;
    bool armed_ = false;
};

// Iterates petviashvili_step from `initial` (default: the Gaussian in params)
// until the residual reaches params.tau or max_iter. When use_aitken is set,
// every third iterate is Aitken-extrapolated and the extrapolation replaces
// the iterate if (and only if) it lowers the equation residual. Never
// re-centers; the delta term handles drift. All diagnostics are recorded.
// Failures come back in `status`/`diagnostic`, never as exceptions.
SolitonResult solve_soliton(const GridSpec& grid, const SolitonParams& params,
                            const RealField* initial = nullptr);

}  // namespace nlsgap
