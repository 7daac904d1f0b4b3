#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nlsgap/birman_schwinger.hpp"
#include "nlsgap/eigensolver.hpp"
#include "oracles.hpp"

using namespace nlsgap;

namespace {

// diagonal-in-sample-space test operator: (D f)_i = d_i f_i. Symmetric in the
// weighted inner product and positive when every d_i > 0; its spectrum is
// exactly {d_i}, which makes missed-multiplicity bugs visible.
ApplyFn diagonal_op(const GridSpec& g, std::vector<double> d) {
    return [g, d = std::move(d)](const RealField& f) {
        RealField out = f;
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] *= d[i];
        return out;
    };
}

std::vector<double> background(const GridSpec& g, std::uint64_t seed, double lo,
                               double hi) {
    std::vector<double> d(g.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : d) v = u(rng);
    return d;
}

}  // namespace

TEST_CASE("identity operator yields eigenvalue one with unit vectors") {
    const GridSpec g = make_grid(6.0, 8);
    EigenParams p;
    p.k = 4;
    const EigenSet e = top_eigs([](const RealField& f) { return f; }, g, p);
    REQUIRE(e.converged);
    REQUIRE(e.values.size() == 4u);
    for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& f : e.fields)
        CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-10));
    for (double r : e.residuals) CHECK(r <= p.tol);
}

TEST_CASE("distinct diagonal values are recovered in order") {
    const GridSpec g = make_grid(6.0, 8);
    std::vector<double> d = background(g, 17, 0.1, 4.9);
    d[10] = 10.0;
    d[20] = 9.0;
    d[30] = 8.0;
    d[40] = 7.0;
    EigenParams p;
    p.k = 4;
    const EigenSet e = top_eigs(diagonal_op(g, d), g, p);
    REQUIRE(e.converged);
    CHECK(e.values[0] == doctest::Approx(10.0).epsilon(1e-11));
    CHECK(e.values[1] == doctest::Approx(9.0).epsilon(1e-11));
    CHECK(e.values[2] == doctest::Approx(8.0).epsilon(1e-11));
    CHECK(e.values[3] == doctest::Approx(7.0).epsilon(1e-11));
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    // each eigenvector concentrates on its own sample
    CHECK(std::abs(e.fields[0].samples[10]) * g.h() * std::sqrt(g.h()) > 0.0);
    for (std::size_t i = 0; i < e.fields.size(); ++i) {
        double best = 0.0;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < e.fields[i].samples.size(); ++j)
            if (std::abs(e.fields[i].samples[j]) > best) {
                best = std::abs(e.fields[i].samples[j]);
                arg = j;
            }
        CHECK(arg == 10u + 10u * i);
    }
}

TEST_CASE("degenerate eigenvalues are found with full multiplicity") {
    // a single-start Krylov space holds one copy of a repeated eigenvalue;
    // the deflated verification rounds must dig out the other copies
    const GridSpec g = make_grid(6.0, 8);
    std::vector<double> d = background(g, 23, 0.1, 4.9);
    d[5] = d[105] = d[205] = 10.0;  // exact triple
    d[55] = 9.0;
    d[155] = 8.5;
    EigenParams p;
    p.k = 5;
    p.cluster_rel_tol = 1e-10;
    const EigenSet e = top_eigs(diagonal_op(g, d), g, p);
    REQUIRE(e.converged);
    REQUIRE(e.values.size() == 5u);
    CHECK(e.values[0] == doctest::Approx(10.0).epsilon(1e-11));
    CHECK(e.values[1] == doctest::Approx(10.0).epsilon(1e-11));
    CHECK(e.values[2] == doctest::Approx(10.0).epsilon(1e-11));
    CHECK(e.values[3] == doctest::Approx(9.0).epsilon(1e-11));
    CHECK(e.values[4] == doctest::Approx(8.5).epsilon(1e-11));
    REQUIRE(e.clusters.size() == 3u);
    CHECK(e.clusters[0].size() == 3u);
    CHECK(e.clusters[1].size() == 1u);
    CHECK(e.clusters[2].size() == 1u);
}

TEST_CASE("eigenvectors are orthonormal and rayleigh-consistent") {
    const GridSpec g = make_grid(6.0, 8);
    const std::vector<double> d = background(g, 31, 0.5, 6.0);
    const ApplyFn op = diagonal_op(g, d);
    EigenParams p;
    p.k = 6;
    const EigenSet e = top_eigs(op, g, p);
    REQUIRE(e.converged);
    for (std::size_t i = 0; i < e.fields.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double ip = inner_product(e.fields[i], e.fields[j]);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    for (std::size_t i = 0; i < e.fields.size(); ++i) {
        const double rayleigh = inner_product(e.fields[i], op(e.fields[i]));
        CHECK(std::abs(rayleigh - e.values[i]) <=
              10.0 * p.tol * std::max(std::abs(e.values[0]), 1.0));
    }
    for (double r : e.residuals) CHECK(r <= p.tol);
}

TEST_CASE("results are identical across seeds") {
    const GridSpec g = make_grid(6.0, 8);
    const std::vector<double> d = background(g, 47, 0.2, 5.0);
    EigenParams p;
    p.k = 5;
    p.seed = 1;
    const EigenSet a = top_eigs(diagonal_op(g, d), g, p);
    p.seed = 987654321;
    const EigenSet b = top_eigs(diagonal_op(g, d), g, p);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-10 * std::max(1.0, a.values[0]));
}

TEST_CASE("top ritz value climbs monotonically across sweeps") {
    const GridSpec g = make_grid(6.0, 8);
    const std::vector<double> d = background(g, 53, 0.2, 5.0);
    const EigenSet e = top_eigs(diagonal_op(g, d), g, EigenParams{});
    REQUIRE(e.converged);
    REQUIRE(!e.lambda1_trace.empty());
    for (std::size_t i = 1; i < e.lambda1_trace.size(); ++i)
        CHECK(e.lambda1_trace[i] >= e.lambda1_trace[i - 1] - 1e-12 * e.lambda1_trace.back());
    CHECK(e.lambda1_trace.back() == doctest::Approx(e.values[0]).epsilon(1e-12));
    CHECK(e.iterations == static_cast<int>(e.lambda1_trace.size()));
}

TEST_CASE("the operator probe rejects non-symmetric and non-positive maps") {
    const GridSpec g = make_grid(6.0, 8);
    // circular shift: orthogonal but not symmetric
    const ApplyFn shift = [g](const RealField& f) {
        RealField out = make_field(g);
        for (int a1 = 0; a1 < g.N; ++a1)
            for (int a2 = 0; a2 < g.N; ++a2)
                for (int a3 = 0; a3 < g.N; ++a3)
                    out.samples[g.lin(a1, a2, a3)] =
                        f.samples[g.lin(g.wrap(a1 + 1), a2, a3)];
        return out;
    };
    CHECK_THROWS_AS(top_eigs(shift, g, EigenParams{}), std::invalid_argument);

    const ApplyFn negate = [](const RealField& f) {
        RealField out = f;
        for (double& s : out.samples) s = -s;
        return out;
    };
    CHECK_THROWS_AS(top_eigs(negate, g, EigenParams{}), std::invalid_argument);

    const ApplyFn regrid = [](const RealField&) { return make_field(make_grid(4.0, 8)); };
    CHECK_THROWS_AS(top_eigs(regrid, g, EigenParams{}), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    const GridSpec g = make_grid(6.0, 8);
    const ApplyFn id = [](const RealField& f) { return f; };
    EigenParams p;
    p.k = 0;
    CHECK_THROWS_AS(top_eigs(id, g, p), std::invalid_argument);
    p.k = 6;
    p.tol = 0.0;
    CHECK_THROWS_AS(top_eigs(id, g, p), std::invalid_argument);
}

TEST_CASE("cluster grouping on sorted values") {
    using vvi = std::vector<std::vector<int>>;
    const vvi got = cluster_multiplicities({3.0, 2.0, 2.0, 2.0, 1.5}, 1e-10);
    REQUIRE(got.size() == 3u);
    CHECK(got[0] == std::vector<int>{0});
    CHECK(got[1] == std::vector<int>{1, 2, 3});
    CHECK(got[2] == std::vector<int>{4});

    const vvi singles = cluster_multiplicities({5.0, 4.0, 3.0}, 1e-10);
    CHECK(singles.size() == 3u);

    // near-ties within the relative tolerance merge
    const vvi near = cluster_multiplicities({1.0, 1.0 - 1e-12, 0.5}, 1e-10);
    REQUIRE(near.size() == 2u);
    CHECK(near[0].size() == 2u);

    CHECK(cluster_multiplicities({}, 1e-10).empty());
    CHECK_THROWS_AS(cluster_multiplicities({1.0, 2.0}, 1e-10), std::invalid_argument);
}

TEST_CASE("krylov spectrum matches the dense decomposition on a real kernel") {
    const GridSpec g = make_grid(4.0, 8);
    const RealField phi = sample_field(g, [](double x, double y, double z) {
        return 2.0 * std::exp(-0.9 * (x * x + y * y + z * z));
    });
    const BSOperator op = make_bs_operator(phi, 1.0, BSKind::minus, make_shared_green(g));
    EigenParams p;
    p.k = 6;
    const EigenSet e =
        top_eigs([&](const RealField& f) { return apply_bs(op, f); }, g, p);
    REQUIRE(e.converged);
    const std::vector<double> want =
        oracle::dense_top_eigs(oracle::dense_bs_matrix(op), 6);
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(e.values[i] - want[i]) <= 1e-10 * std::max(1.0, want[0]));
}
