#include "nlsgap/gap_analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace nlsgap {

namespace {

// Real roots of c0 + c1 t + c2 t^2 + c3 t^3, degrading to the quadratic or
// linear case when leading coefficients vanish relative to the largest one.
std::vector<double> real_poly_roots(const Eigen::Vector4d& c) {
    const double scale = c.cwiseAbs().maxCoeff();
    if (scale == 0.0) return {};
    const double tiny = 1e-14 * scale;
    if (std::abs(c(3)) > tiny) {
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(0, 2) = -c(0) / c(3);
        comp(1, 2) = -c(1) / c(3);
        comp(2, 2) = -c(2) / c(3);
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
        std::vector<double> roots;
        for (int i = 0; i < 3; ++i) {
            std::complex<double> z = es.eigenvalues()(i);
            if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) roots.push_back(z.real());
        }
        return roots;
    }
    if (std::abs(c(2)) > tiny) {
        const double disc = c(1) * c(1) - 4.0 * c(2) * c(0);
        if (disc < 0.0) return {};
        const double q = -0.5 * (c(1) + std::copysign(std::sqrt(disc), c(1)));
        std::vector<double> roots;
        if (q != 0.0) roots.push_back(c(0) / q);
        roots.push_back(q / c(2));
        return roots;
    }
    if (std::abs(c(1)) > tiny) return {-c(0) / c(1)};
    return {};
}

struct CubicFit {
    Eigen::Vector4d coeffs = Eigen::Vector4d::Zero();  // of lambda(t) - 1
    std::optional<double> root_beta;
};

// Interpolating cubic through four approximately equispaced (beta, lambda)
// samples in the scaled variable t = (2*beta - b0 - b3)/(b3 - b0), solved
// for lambda = 1. root_beta is set only when the in-bracket root is unique.
CubicFit fit_cubic_scaled(const std::vector<double>& betas, const std::vector<double>& lambdas) {
    if (betas.size() != 4 || lambdas.size() != 4)
        throw std::invalid_argument("cubic_root_from_table: need exactly four samples");
    const double b0 = betas.front();
    const double b3 = betas.back();
    const double span = b3 - b0;
    if (!(span > 0.0))
        throw std::invalid_argument("cubic_root_from_table: betas must be strictly increasing");
    for (int i = 1; i < 4; ++i) {
        if (!(betas[i] > betas[i - 1]))
            throw std::invalid_argument("cubic_root_from_table: betas must be strictly increasing");
        if (std::abs(betas[i] - (b0 + i * span / 3.0)) > 1e-6 * span)
            throw std::invalid_argument("cubic_root_from_table: betas must be equispaced");
    }

    Eigen::Matrix4d vand;
    Eigen::Vector4d rhs;
    for (int i = 0; i < 4; ++i) {
        const double t = (2.0 * betas[i] - b0 - b3) / span;
        vand(i, 0) = 1.0;
        vand(i, 1) = t;
        vand(i, 2) = t * t;
        vand(i, 3) = t * t * t;
        rhs(i) = lambdas[i] - 1.0;
    }
    CubicFit fit;
    fit.coeffs = vand.fullPivLu().solve(rhs);

    std::vector<double> inside;
    for (double t : real_poly_roots(fit.coeffs))
        if (t >= -1.0 - 1e-9 && t <= 1.0 + 1e-9) inside.push_back(t);
    std::sort(inside.begin(), inside.end());
    inside.erase(std::unique(inside.begin(), inside.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
                 inside.end());
    if (inside.size() == 1) {
        const double t = std::clamp(inside.front(), -1.0, 1.0);
        fit.root_beta = 0.5 * (span * t + b0 + b3);
    }
    return fit;
}

}  // namespace

GapReport gap_check(double beta, const GridSpec& grid, const GapParams& params,
                    const RealField* initial, SharedGreen green) {
    if (params.eigs.k < 5)
        throw std::invalid_argument("gap_check: k must be at least 5 to form both gap verdicts");

    GapReport rep;
    rep.beta = beta;
    SolitonParams sp = params.soliton;
    sp.beta = beta;
    rep.soliton = solve_soliton(grid, sp, initial);
    if (!rep.soliton.converged) {
        rep.note = rep.soliton.diagnostic.empty() ? "soliton iteration failed"
                                                  : rep.soliton.diagnostic;
        return rep;
    }

    if (!green) green = make_shared_green(grid);
    const BSOperator k_minus = make_bs_operator(rep.soliton.phi, beta, BSKind::minus, green);
    const EigenSet eig =
        top_eigs([&](const RealField& f) { return apply_bs(k_minus, f); }, grid, params.eigs);

    rep.lambdas_minus = eig.values;
    rep.residuals = eig.residuals;
    rep.eigs_converged = eig.converged;
    const double scale = 2.0 * beta + 1.0;
    rep.lambdas_plus.resize(eig.values.size());
    for (std::size_t i = 0; i < eig.values.size(); ++i)
        rep.lambdas_plus[i] = scale * eig.values[i];
    if (rep.lambdas_plus.size() >= 4) {
        const double hi = rep.lambdas_plus[1];
        const double lo = rep.lambdas_plus[3];
        rep.triplet_spread = (hi - lo) / std::max(std::abs(rep.lambdas_plus[2]), 1e-300);
    }

    if (params.cross_check_plus) {
        const BSOperator k_plus = make_bs_operator(rep.soliton.phi, beta, BSKind::plus, green);
        const EigenSet direct =
            top_eigs([&](const RealField& f) { return apply_bs(k_plus, f); }, grid, params.eigs);
        double err = 0.0;
        const std::size_t count = std::min(direct.values.size(), rep.lambdas_plus.size());
        for (std::size_t i = 0; i < count; ++i)
            err = std::max(err, std::abs(direct.values[i] - rep.lambdas_plus[i]) /
                                    std::max(std::abs(rep.lambdas_plus[i]), 1e-300));
        rep.cross_check_error = err;
    }

    if (!eig.converged) {
        rep.note = "eigensolver did not reach tolerance";
        return rep;
    }
    rep.verdict_valid = true;
    rep.gap_minus_ok = rep.lambdas_minus[1] < 1.0;
    rep.gap_plus_ok = rep.lambdas_plus[4] < 1.0;
    rep.gap_ok = rep.gap_minus_ok && rep.gap_plus_ok;
    return rep;
}

std::vector<GapReport> beta_scan(const std::vector<double>& betas, const GridSpec& grid,
                                 const GapParams& params, bool warm_start) {
    if (betas.empty()) throw std::invalid_argument("beta_scan: empty beta list");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1]))
            throw std::invalid_argument("beta_scan: betas must be strictly increasing");

    const SharedGreen green = make_shared_green(grid);
    std::vector<GapReport> rows;
    rows.reserve(betas.size());
    RealField warm_field;
    bool have_warm = false;
    for (double b : betas) {
        GapReport rep;
        try {
            rep = gap_check(b, grid, params, (warm_start && have_warm) ? &warm_field : nullptr,
                            green);
        } catch (const std::exception& e) {
            rep = GapReport{};
            rep.beta = b;
            rep.note = e.what();
        }
        if (warm_start && rep.soliton.converged) {
            warm_field = rep.soliton.phi;
            have_warm = true;
        }
        rows.push_back(std::move(rep));
    }
    return rows;
}

std::optional<double> cubic_root_from_table(const std::vector<double>& betas,
                                            const std::vector<double>& lambdas) {
    return fit_cubic_scaled(betas, lambdas).root_beta;
}

BetaStarResult find_beta_star(double beta_lo, double beta_hi, const GridSpec& grid,
                              const GapParams& params, double beta_tol) {
    if (!(beta_hi > beta_lo))
        throw std::invalid_argument("find_beta_star: bracket must satisfy beta_lo < beta_hi");
    if (!(beta_tol > 0.0)) throw std::invalid_argument("find_beta_star: beta_tol must be positive");

    const SharedGreen green = make_shared_green(grid);
    RealField warm_field;
    bool have_warm = false;
    double residual_max = 0.0;

    // lambda_5(K+) at one beta; warm-starts from the previous call and
    // accumulates the propagated eigenvalue residual bound
    auto eval = [&](double b) {
        GapReport rep = gap_check(b, grid, params, have_warm ? &warm_field : nullptr, green);
        if (!rep.verdict_valid) {
            std::ostringstream os;
            os << "find_beta_star: solve failed at beta = " << b;
            if (!rep.note.empty()) os << " (" << rep.note << ")";
            throw std::runtime_error(os.str());
        }
        warm_field = rep.soliton.phi;
        have_warm = true;
        if (rep.residuals.size() > 4)
            residual_max = std::max(residual_max, (2.0 * b + 1.0) * rep.residuals[4]);
        return rep.lambdas_plus[4];
    };

    BetaStarResult out;
    double lo = beta_lo;
    double hi = beta_hi;
    double g_lo = eval(lo) - 1.0;
    double g_hi = eval(hi) - 1.0;
    if (g_lo != 0.0 && g_hi != 0.0 && (g_lo > 0.0) == (g_hi > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "find_beta_star: lambda_5(K+) - 1 does not change sign on [" << beta_lo << ", "
           << beta_hi << "] (values " << g_lo + 1.0 << ", " << g_hi + 1.0 << ")";
        throw BracketError(os.str());
    }

    while (hi - lo > beta_tol) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = eval(mid) - 1.0;
        ++out.bisection_steps;
        if (g_mid == 0.0) {
            // exact hit: center a minimal bracket on it for the table step
            lo = mid - 0.5 * beta_tol;
            hi = mid + 0.5 * beta_tol;
            g_lo = eval(lo) - 1.0;
            g_hi = eval(hi) - 1.0;
            break;
        }
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }

    // four-point cubic across the final bracket; a non-unique root triggers
    // one more bisection step and a re-fit
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double step = (hi - lo) / 3.0;
        std::array<double, 4> bs{lo, lo + step, lo + 2.0 * step, hi};
        std::array<double, 4> ls{g_lo + 1.0, eval(bs[1]), eval(bs[2]), g_hi + 1.0};
        out.sample_betas.assign(bs.begin(), bs.end());
        out.sample_lambdas.assign(ls.begin(), ls.end());

        const CubicFit fit = fit_cubic_scaled(out.sample_betas, out.sample_lambdas);
        out.cubic_coeffs.assign(fit.coeffs.data(), fit.coeffs.data() + 4);
        if (fit.root_beta) {
            out.beta_star = *fit.root_beta;
            out.from_cubic = true;
            const double t = (2.0 * out.beta_star - bs[0] - bs[3]) / (bs[3] - bs[0]);
            const double dpdt =
                fit.coeffs(1) + 2.0 * fit.coeffs(2) * t + 3.0 * fit.coeffs(3) * t * t;
            const double slope_beta = std::abs(dpdt) * 2.0 / (bs[3] - bs[0]);
            out.uncertainty = (slope_beta > 0.0)
                                  ? std::max(beta_tol, residual_max / slope_beta)
                                  : beta_tol;
            break;
        }

        const double mid = 0.5 * (lo + hi);
        const double g_mid = eval(mid) - 1.0;
        ++out.bisection_steps;
        if (g_mid != 0.0 && (g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
        out.detail += "cubic root not unique in bracket; bisected and re-fit\n";
    }
    if (!out.from_cubic) {
        out.beta_star = 0.5 * (lo + hi);
        out.uncertainty = std::max(beta_tol, 0.5 * (hi - lo));
        out.detail += "cubic fit failed repeatedly; reporting the bisection midpoint";
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

}  // namespace nlsgap
