#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nlsgap/grid.hpp"

namespace nlsgap {

struct EigenParams {
    int k = 6;                 // eigenpairs wanted
    double tol = 1e-12;        // accept when ||K v - lambda v|| <= tol, ||v|| = 1
    int max_restarts = 300;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    double cluster_rel_tol = 1e-8;  // reporting-level multiplicity grouping
};

struct EigenSet {
    std::vector<double> values;          // non-increasing, size k
    std::vector<RealField> fields;       // orthonormal in the weighted inner product
    std::vector<double> residuals;       // ||K v - lambda v|| per pair
    int iterations = 0;                  // restart sweeps consumed
    std::vector<std::vector<int>> clusters;  // 0-based index groups
    bool converged = false;
    std::vector<double> lambda1_trace;   // top Ritz value after each sweep
};

using ApplyFn = std::function<RealField(const RealField&)>;

// Top-k eigenpairs of a symmetric positive operator given only its
// application, by Lanczos with full reorthogonalization and thick restarts.
// Krylov block dimension min(2k+10, 40), k+4 Ritz pairs carried internally.
// The operator is probed for symmetry and positivity on 3 random pairs up
// front and rejected (std::invalid_argument) if it fails. Deterministic for
// a fixed seed. Non-convergence within max_restarts returns the best
// available pairs with converged = false.
EigenSet top_eigs(const ApplyFn& op, const GridSpec& grid, const EigenParams& params);

// Greedy grouping of sorted (non-increasing) values: a value joins the
// current cluster when it sits within rel_tol * max(|values[0]|, 1) of its
// predecessor. Returns 0-based index groups.
std::vector<std::vector<int>> cluster_multiplicities(const std::vector<double>& values,
                                                     double rel_tol);

}  // namespace nlsgap
