#include "nlsgap/soliton.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nlsgap {

namespace {

constexpr double kTinyDen = 1e-300;

// sign-preserving |v|^{2b} * v; the absolute value keeps fractional powers
// defined when an iterate momentarily undershoots zero
RealField nonlinearity(const RealField& phi, double beta) {
    RealField out = make_field(phi.grid);
    const double p = 2.0 * beta;
    for (std::size_t i = 0; i < phi.samples.size(); ++i) {
        const double v = phi.samples[i];
        const double a = std::abs(v);
        out.samples[i] = a < kTinyDen ? 0.0 : std::pow(a, p) * v;
    }
    return out;
}

struct MSums {
    double plain_num = 0.0, plain_den = 0.0;  // sums of f^2-type plain products
    double conj_num = 0.0, conj_den = 0.0;    // Hermitian pairing (= physical forms)
};

MSums m_sums(const Spectrum& phihat, const Spectrum& Nhat) {
    const GridSpec& g = phihat.grid;
    MSums s;
    std::size_t idx = 0;
    for (int a1 = 0; a1 < g.N; ++a1) {
        const double x1 = g.xi_of(a1);
        for (int a2 = 0; a2 < g.N; ++a2) {
            const double x2 = g.xi_of(a2);
            for (int a3 = 0; a3 < g.N; ++a3, ++idx) {
                const double x3 = g.xi_of(a3);
                const double w = 1.0 + x1 * x1 + x2 * x2 + x3 * x3;
                const std::complex<double> ph = phihat.coeffs[idx];
                const std::complex<double> nh = Nhat.coeffs[idx];
                s.plain_num += w * (ph * ph).real();
                s.plain_den += (ph * nh).real();
                s.conj_num += w * std::norm(ph);
                s.conj_den += (std::conj(ph) * nh).real();
            }
        }
    }
    return s;
}

double m_from_sums(const MSums& s, bool cross_check) {
    if (std::abs(s.plain_den) < kTinyDen)
        throw std::domain_error("compute_M: denominator below 1e-300 (degenerate input)");
    const double m = s.plain_num / s.plain_den;
    if (cross_check) {
        if (std::abs(s.conj_den) < kTinyDen)
            throw std::domain_error("compute_M: denominator below 1e-300 (degenerate input)");
        const double m_phys = s.conj_num / s.conj_den;
        if (std::abs(m - m_phys) > 1e-12 * std::max(1.0, std::abs(m)))
            throw std::runtime_error(
                "compute_M: frequency-domain and physical-space forms disagree; "
                "input is not an origin-symmetric profile");
    }
    return m;
}

double r_ratio(const Spectrum& phihat, const Spectrum& Nhat, int axis,
               bool* degenerate) {
    const GridSpec& g = phihat.grid;
    const int nyq = g.N / 2;
    double num = 0.0, den = 0.0;
    std::size_t idx = 0;
    for (int a1 = 0; a1 < g.N; ++a1) {
        const double x1 = g.xi_of(a1);
        for (int a2 = 0; a2 < g.N; ++a2) {
            const double x2 = g.xi_of(a2);
            for (int a3 = 0; a3 < g.N; ++a3, ++idx) {
                const int a = axis == 1 ? a1 : axis == 2 ? a2 : a3;
                if (a == nyq) continue;  // derivative zeroes the Nyquist mode
                const double x3 = g.xi_of(a3);
                const double xa = axis == 1 ? x1 : axis == 2 ? x2 : x3;
                const double w = 1.0 + x1 * x1 + x2 * x2 + x3 * x3;
                const std::complex<double> ph = phihat.coeffs[idx];
                const std::complex<double> nh = Nhat.coeffs[idx];
                // plain products: phihat*(i xa phihat) and (i xa phihat)*(i xa Nhat)
                num += w * xa * (std::complex<double>(0.0, 1.0) * ph * ph).real();
                den -= xa * xa * (ph * nh).real();
            }
        }
    }
    if (degenerate) *degenerate = false;
    if (std::abs(den) < kTinyDen) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return num / den;
}

// one update from precomputed spectra of the current iterate
RealField assemble_step(const Spectrum& phihat, const Spectrum& Nhat,
                        const SolitonParams& params, double& M_out,
                        std::array<double, 3>& R_out) {
    const GridSpec& g = phihat.grid;
    const double M = m_from_sums(m_sums(phihat, Nhat), /*cross_check=*/false);
    if (!(M > 0.0))
        throw std::domain_error(
            "petviashvili_step: amplitude constant M <= 0; iterate is outside "
            "the convergence basin");
    M_out = M;
    const double mg = std::pow(M, gamma_exponent(params.beta));

    Spectrum upd{g, std::vector<std::complex<double>>(g.size())};
    std::size_t idx = 0;
    for (int a1 = 0; a1 < g.N; ++a1) {
        const double x1 = g.xi_of(a1);
        for (int a2 = 0; a2 < g.N; ++a2) {
            const double x2 = g.xi_of(a2);
            for (int a3 = 0; a3 < g.N; ++a3, ++idx) {
                const double x3 = g.xi_of(a3);
                const double w = 1.0 + x1 * x1 + x2 * x2 + x3 * x3;
                upd.coeffs[idx] = mg * Nhat.coeffs[idx] / w;
            }
        }
    }
    RealField out = ifft3(upd);

    R_out = {0.0, 0.0, 0.0};
    if (params.delta != 0.0) {
        for (int axis = 1; axis <= 3; ++axis) {
            const double Rj = r_ratio(phihat, Nhat, axis, nullptr);
            R_out[axis - 1] = Rj;
            if (Rj == 0.0) continue;
            Spectrum der{g, std::vector<std::complex<double>>(g.size())};
            std::size_t k = 0;
            for (int a1 = 0; a1 < g.N; ++a1)
                for (int a2 = 0; a2 < g.N; ++a2)
                    for (int a3 = 0; a3 < g.N; ++a3, ++k) {
                        const int a = axis == 1 ? a1 : axis == 2 ? a2 : a3;
                        if (a == g.N / 2) {
                            der.coeffs[k] = 0.0;
                            continue;
                        }
                        const double xa = g.xi_of(a);
                        der.coeffs[k] =
                            std::complex<double>(0.0, xa) * phihat.coeffs[k];
                    }
            RealField d = ifft3(der);
            const double c = params.delta * Rj;
            for (std::size_t i = 0; i < out.samples.size(); ++i)
                out.samples[i] += c * d.samples[i];
        }
    } else {
        // classical scheme: the translation term is exactly absent, but the
        // constants are still reported
        for (int axis = 1; axis <= 3; ++axis)
            R_out[axis - 1] = r_ratio(phihat, Nhat, axis, nullptr);
    }
    return out;
}

// || (1+|xi|^2) phihat - Nhat || / || phihat ||; Parseval factors cancel
double residual_from_spectra(const Spectrum& phihat, const Spectrum& Nhat) {
    const GridSpec& g = phihat.grid;
    double num = 0.0, den = 0.0;
    std::size_t idx = 0;
    for (int a1 = 0; a1 < g.N; ++a1) {
        const double x1 = g.xi_of(a1);
        for (int a2 = 0; a2 < g.N; ++a2) {
            const double x2 = g.xi_of(a2);
            for (int a3 = 0; a3 < g.N; ++a3, ++idx) {
                const double x3 = g.xi_of(a3);
                const double w = 1.0 + x1 * x1 + x2 * x2 + x3 * x3;
                num += std::norm(w * phihat.coeffs[idx] - Nhat.coeffs[idx]);
                den += std::norm(phihat.coeffs[idx]);
            }
        }
    }
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

void check_beta(double beta, const char* who) {
    if (!(beta > 0.0))
        throw std::invalid_argument(std::string(who) + ": beta must be positive");
}

}  // namespace

double compute_M(const RealField& phi, double beta) {
    check_beta(beta, "compute_M");
    Spectrum phihat = fft3(phi);
    Spectrum Nhat = fft3(nonlinearity(phi, beta));
    return m_from_sums(m_sums(phihat, Nhat), /*cross_check=*/true);
}

double compute_R(const RealField& phi, double beta, int axis, bool* degenerate) {
    check_beta(beta, "compute_R");
    if (axis < 1 || axis > 3)
        throw std::invalid_argument("compute_R: axis must be 1, 2 or 3");
    Spectrum phihat = fft3(phi);
    Spectrum Nhat = fft3(nonlinearity(phi, beta));
    return r_ratio(phihat, Nhat, axis, degenerate);
}

RealField petviashvili_step(const RealField& phi, const SolitonParams& params) {
    check_beta(params.beta, "petviashvili_step");
    Spectrum phihat = fft3(phi);
    Spectrum Nhat = fft3(nonlinearity(phi, params.beta));
    double M;
    std::array<double, 3> R;
    return assemble_step(phihat, Nhat, params, M, R);
}

RealField aitken(const RealField& f0, const RealField& f1, const RealField& f2) {
    if (!(f0.grid == f1.grid) || !(f1.grid == f2.grid))
        throw std::invalid_argument("aitken: grid mismatch");
    RealField out = make_field(f0.grid);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double a = f0.samples[i], b = f1.samples[i], c = f2.samples[i];
        const double den = c - 2.0 * b + a;
        const double d1 = b - a;
        out.samples[i] = std::abs(den) < 1e-14 * (std::abs(a) + 1.0)
                             ? c
                             : a - d1 * d1 / den;
    }
    return out;
}

double euler_lagrange_residual(const RealField& phi, double beta) {
    check_beta(beta, "euler_lagrange_residual");
    bool all_zero = true;
    for (double v : phi.samples)
        if (v != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) return std::numeric_limits<double>::infinity();
    Spectrum phihat = fft3(phi);
    Spectrum Nhat = fft3(nonlinearity(phi, beta));
    return residual_from_spectra(phihat, Nhat);
}

SolitonResult solve_soliton(const GridSpec& grid, const SolitonParams& params,
                            const RealField* initial) {
    if (params.beta < 2.0 / 3.0 || params.beta > 2.0)
        throw std::invalid_argument("solve_soliton: beta outside the accepted range [2/3, 2]");
    if (!(params.tau > 0.0)) throw std::invalid_argument("solve_soliton: tau must be positive");
    if (params.max_iter < 1) throw std::invalid_argument("solve_soliton: max_iter must be >= 1");
    if (!(params.init_amplitude > 0.0) || !(params.init_width > 0.0))
        throw std::invalid_argument("solve_soliton: initial Gaussian must have positive amplitude and width");

    SolitonResult res;
    res.params = params;
    if (initial) {
        if (!(initial->grid == grid))
            throw std::invalid_argument("solve_soliton: initial field is on a different grid");
        for (double v : initial->samples)
            if (!std::isfinite(v))
                throw std::invalid_argument("solve_soliton: initial field has nonfinite samples");
        res.phi = *initial;
    } else {
        const double A = params.init_amplitude;
        const double iw2 = 1.0 / (params.init_width * params.init_width);
        res.phi = sample_field(grid, [&](double x1, double x2, double x3) {
            return A * std::exp(-(x1 * x1 + x2 * x2 + x3 * x3) * iw2);
        });
    }

    DivergenceGuard guard;
    std::vector<RealField> ring;
    double current_res = std::numeric_limits<double>::infinity();

    Spectrum phihat = fft3(res.phi);
    Spectrum Nhat = fft3(nonlinearity(res.phi, params.beta));

    try {
        for (int it = 1; it <= params.max_iter; ++it) {
            double M;
            std::array<double, 3> R;
            RealField next = assemble_step(phihat, Nhat, params, M, R);
            Spectrum nexthat = fft3(next);
            Spectrum nNhat = fft3(nonlinearity(next, params.beta));
            current_res = residual_from_spectra(nexthat, nNhat);

            res.iterations = it;
            res.residual_history.push_back(current_res);
            res.M_history.push_back(M);
            res.R_history.push_back(R);

            res.phi = std::move(next);
            phihat = std::move(nexthat);
            Nhat = std::move(nNhat);

            if (current_res <= params.tau) {
                res.converged = true;
                break;
            }
            if (guard.update(current_res)) {
                res.status = SolveStatus::diverged;
                std::ostringstream os;
                os << "residual grew 10x from its running minimum after reaching "
                      "1e-3: the iteration is diverging from the fixed point. "
                      "Box L = " << grid.L << " with N = " << grid.N
                   << " is in the underresolved regime (L of the order of N/4 "
                      "or above); increase N or decrease L.";
                res.diagnostic = os.str();
                return res;
            }

            if (params.use_aitken) {
                ring.push_back(res.phi);
                if (ring.size() == 3) {
                    RealField cand = aitken(ring[0], ring[1], ring[2]);
                    Spectrum candhat = fft3(cand);
                    Spectrum cNhat = fft3(nonlinearity(cand, params.beta));
                    const double cand_res = residual_from_spectra(candhat, cNhat);
                    // adopt the extrapolation only when it actually helps;
                    // unconditional replacement is unstable on coarse grids
                    if (cand_res < current_res) {
                        res.phi = std::move(cand);
                        phihat = std::move(candhat);
                        Nhat = std::move(cNhat);
                        current_res = cand_res;
                        ++res.aitken_accepted;
                        if (cand_res <= params.tau) {
                            res.converged = true;
                            ring.clear();
                            break;
                        }
                    }
                    ring.clear();
                }
            }
        }
    } catch (const std::domain_error& e) {
        res.status = SolveStatus::degenerate;
        res.diagnostic = e.what();
        return res;
    }

    if (!res.converged) {
        res.status = SolveStatus::max_iterations;
        std::ostringstream os;
        os << "no convergence after " << params.max_iter
           << " iterations (residual " << current_res << ", tolerance "
           << params.tau << ")";
        res.diagnostic = os.str();
        return res;
    }

    double mn = res.phi.samples[0];
    for (double v : res.phi.samples) mn = std::min(mn, v);
    if (!(mn > 0.0)) {
        res.converged = false;
        res.status = SolveStatus::nonpositive_profile;
        std::ostringstream os;
        os << "iteration converged, but to a profile with nonpositive samples "
              "(min " << mn << "): a spurious lattice-scale state, not the "
              "soliton. Box L = " << grid.L << " with N = " << grid.N
           << " is in the underresolved regime (L of the order of N/4 or "
              "above); increase N or decrease L.";
        res.diagnostic = os.str();
        return res;
    }

    res.status = SolveStatus::converged;
    return res;
}

}  // namespace nlsgap
