#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsgap/birman_schwinger.hpp"
#include "nlsgap/eigensolver.hpp"
#include "nlsgap/soliton.hpp"
#include "nlsgap/special.hpp"

namespace nlsgap {

// The supplied beta bracket does not straddle the lambda_5(K+) = 1 crossing.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gap verdict for a single beta: eigenvalues of both Birman-Schwinger
// operators plus the soliton solve that produced them.
struct GapReport {
    double beta = 0.0;
    SolitonResult soliton;
    std::vector<double> lambdas_minus;  // descending, from the K- eigensolve
    std::vector<double> lambdas_plus;   // (2*beta+1) * lambdas_minus
    std::vector<double> residuals;      // eigenpair residuals of the K- solve
    bool eigs_converged = false;
    bool gap_minus_ok = false;          // lambda_2(K-) < 1
    bool gap_plus_ok = false;           // lambda_5(K+) < 1
    bool gap_ok = false;                // both, and everything converged
    bool verdict_valid = false;         // false when soliton or eigs failed
    double triplet_spread = 0.0;        // relative spread of lambda_2..4(K+)
    double cross_check_error = -1.0;    // direct K+ solve mismatch; -1 if skipped
    std::string note;                   // failure detail for rows whose verdict is withheld
};

struct GapParams {
    SolitonParams soliton;
    EigenParams eigs;
    bool cross_check_plus = false;  // also solve K+ directly and compare
};

// Solve at one beta. K+ eigenvalues come from the K- solve scaled by
// (2*beta+1); the two operators share eigenvectors because they differ by
// that constant factor only. `initial` warm-starts the soliton iteration;
// `green` may carry precomputed Green weights for the grid.
GapReport gap_check(double beta, const GridSpec& grid, const GapParams& params,
                    const RealField* initial = nullptr, SharedGreen green = nullptr);

// Sweep a strictly increasing list of betas on one grid. Green weights are
// computed once. With warm_start, each solve starts from the previous
// converged profile; failures are recorded per row and the sweep continues.
std::vector<GapReport> beta_scan(const std::vector<double>& betas, const GridSpec& grid,
                                 const GapParams& params, bool warm_start = true);

// Cubic through four equispaced (beta, lambda) samples, solved for
// lambda(beta) = 1 in the scaled variable t in [-1, 1]. Returns the unique
// in-bracket root, or nullopt when there is none or several (caller falls
// back to bisection refinement).
std::optional<double> cubic_root_from_table(const std::vector<double>& betas,
                                            const std::vector<double>& lambdas);

struct BetaStarResult {
    double beta_star = 0.0;
    double uncertainty = 0.0;
    double bracket_lo = 0.0;             // final bracket after bisection
    double bracket_hi = 0.0;
    std::vector<double> sample_betas;    // the four cubic-fit abscissae
    std::vector<double> sample_lambdas;  // lambda_5(K+) at those betas
    std::vector<double> cubic_coeffs;    // c0..c3 of lambda(t) - 1, t = (2b - b0 - b3)/(b3 - b0)
    int bisection_steps = 0;
    bool from_cubic = false;  // false: bisection midpoint fallback
    std::string detail;
};

// Locate the beta where lambda_5(K+) crosses 1. Bisection on the sign of
// lambda_5 - 1 down to width beta_tol, then a four-point cubic fit across
// the final bracket. Throws when the initial bracket does not straddle the
// crossing or a solve inside it fails.
BetaStarResult find_beta_star(double beta_lo, double beta_hi, const GridSpec& grid,
                              const GapParams& params, double beta_tol = 1e-4);

}  // namespace nlsgap
