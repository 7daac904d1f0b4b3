// Command-line front end: soliton solves, gap eigenvalue reports, beta scans
// and beta-star localization, with CSV and binary-field outputs.
//
// Exit codes: 0 success (and assertion pass), 1 computational failure
// (non-convergence, missing sign change, failed gap assertion), 2 usage or
// file-format error.

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nlsgap/birman_schwinger.hpp"
#include "nlsgap/eigensolver.hpp"
#include "nlsgap/gap_analysis.hpp"
#include "nlsgap/grid.hpp"
#include "nlsgap/io.hpp"
#include "nlsgap/soliton.hpp"

namespace {

using namespace nlsgap;

struct Options {
    double L = 15.0;
    int N = 60;
    double beta = 1.0;
    double beta_min = 2.0 / 3.0;
    double beta_max = 1.0;
    int steps = 11;
    std::vector<double> bracket;
    double soliton_tol = 1e-11;
    double eig_tol = 1e-12;
    double beta_tol = 1e-4;
    double delta = -0.5;
    bool no_aitken = false;
    int k = 6;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    int threads = 0;  // 0 = all available cores
    std::string out;
    std::string load;
    std::string input;
    bool assert_gap = false;
    bool cross_check = false;
    bool cold_start = false;
    bool table_only = false;
};

void apply_threads(const Options& o) {
    int n = o.threads;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    set_fft_threads(n);
}

GapParams gap_params(const Options& o) {
    GapParams p;
    p.soliton.tau = o.soliton_tol;
    p.soliton.delta = o.delta;
    p.soliton.use_aitken = !o.no_aitken;
    p.eigs.k = o.k;
    p.eigs.tol = o.eig_tol;
    p.eigs.seed = o.seed;
    p.cross_check_plus = o.cross_check;
    return p;
}

// Loads a warm-start field and reconciles its header with explicit flags.
std::optional<RealField> maybe_load(const Options& o, bool L_set, bool N_set, GridSpec& grid) {
    if (o.load.empty()) {
        grid = make_grid(o.L, o.N);
        return std::nullopt;
    }
    RealField f = load_field(o.load);
    if ((L_set && f.grid.L != o.L) || (N_set && f.grid.N != o.N)) {
        std::ostringstream os;
        os << "field file '" << o.load << "' has L=" << f.grid.L << ", N=" << f.grid.N
           << " but the flags request L=" << o.L << ", N=" << o.N;
        throw FormatError(os.str());
    }
    grid = f.grid;
    return f;
}

int cmd_soliton(const Options& o) {
    apply_threads(o);
    const GridSpec grid = make_grid(o.L, o.N);
    SolitonParams sp;
    sp.beta = o.beta;
    sp.tau = o.soliton_tol;
    sp.delta = o.delta;
    sp.use_aitken = !o.no_aitken;

    std::optional<RealField> init;
    if (!o.load.empty()) init = load_field(o.load);
    const SolitonResult r = solve_soliton(grid, sp, init ? &*init : nullptr);

    const double final_res = r.residual_history.empty() ? -1.0 : r.residual_history.back();
    const double final_M = r.M_history.empty() ? 0.0 : r.M_history.back();
    double max_R = 0.0;
    if (!r.R_history.empty())
        for (double v : r.R_history.back()) max_R = std::max(max_R, std::abs(v));
    std::printf("soliton beta=%.17g L=%.17g N=%d\n", o.beta, grid.L, grid.N);
    std::printf("  iterations        %d (aitken accepted: %d)\n", r.iterations,
                r.aitken_accepted);
    std::printf("  final residual    %.17g\n", final_res);
    std::printf("  final M           %.17g\n", final_M);
    std::printf("  final max |R_j|   %.17g\n", max_R);
    std::printf("  converged         %s\n", r.converged ? "yes" : "no");

    if (!o.out.empty()) {
        save_field(r.phi, o.out);
        write_text_file(o.out + ".csv", soliton_history_csv(r, grid));
        std::printf("  wrote %s and %s.csv\n", o.out.c_str(), o.out.c_str());
    }
    if (!r.converged) {
        std::cerr << "soliton iteration failed: " << r.diagnostic << "\n";
        return 1;
    }
    return 0;
}

int cmd_eigs(const Options& o, bool L_set, bool N_set) {
    apply_threads(o);
    GridSpec grid;
    const std::optional<RealField> warm = maybe_load(o, L_set, N_set, grid);
    const GapParams params = gap_params(o);
    const GapReport rep = gap_check(o.beta, grid, params, warm ? &*warm : nullptr);

    std::printf("gap report beta=%.17g L=%.17g N=%d\n", rep.beta, grid.L, grid.N);
    if (!rep.soliton.converged) {
        std::cerr << "soliton iteration failed: " << rep.note << "\n";
        return 1;
    }
    std::printf("  %-3s %-24s %-24s %s\n", "i", "lambda(K-)", "lambda(K+)", "residual");
    for (std::size_t i = 0; i < rep.lambdas_minus.size(); ++i)
        std::printf("  %-3zu %-24.17g %-24.17g %.3e\n", i + 1, rep.lambdas_minus[i],
                    rep.lambdas_plus[i], i < rep.residuals.size() ? rep.residuals[i] : -1.0);
    std::printf("  triplet spread    %.3e\n", rep.triplet_spread);
    if (rep.cross_check_error >= 0.0)
        std::printf("  cross-check error %.3e\n", rep.cross_check_error);
    std::printf("  lambda2(K-) < 1   %s\n", rep.gap_minus_ok ? "yes" : "no");
    std::printf("  lambda5(K+) < 1   %s\n", rep.gap_plus_ok ? "yes" : "no");
    std::printf("  gap property      %s\n", rep.gap_ok ? "holds" : "fails");

    if (!o.out.empty()) write_text_file(o.out, gap_report_csv(rep, grid));
    if (!rep.verdict_valid) {
        std::cerr << "verdict withheld: " << rep.note << "\n";
        return 1;
    }
    if (o.assert_gap) return rep.gap_ok ? 0 : 1;
    return 0;
}

int cmd_scan(const Options& o) {
    apply_threads(o);
    const GridSpec grid = make_grid(o.L, o.N);
    if (!(o.beta_max > o.beta_min))
        throw CLI::ValidationError("scan", "--beta-max must exceed --beta-min");
    if (o.steps < 2) throw CLI::ValidationError("scan", "--steps must be at least 2");
    std::vector<double> betas(o.steps);
    for (int i = 0; i < o.steps; ++i)
        betas[i] = o.beta_min + i * (o.beta_max - o.beta_min) / (o.steps - 1);

    const std::vector<GapReport> rows = beta_scan(betas, grid, gap_params(o), !o.cold_start);
    const std::string csv = scan_csv(rows, grid);
    if (o.out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text_file(o.out, csv);
        std::printf("wrote %zu-row scan to %s\n", rows.size(), o.out.c_str());
    }
    bool all_ok = true;
    for (const GapReport& r : rows)
        if (!r.verdict_valid) {
            all_ok = false;
            std::cerr << "beta=" << format_real(r.beta) << " incomplete: " << r.note << "\n";
        }
    return all_ok ? 0 : 1;
}

int cmd_betastar(const Options& o) {
    if (o.table_only) {
        if (o.input.empty())
            throw CLI::RequiredError("--table-only needs --input with a 4-row (beta,lambda) CSV");
        const auto rows = parse_csv(read_text_file(o.input));
        if (rows.size() != 4)
            throw FormatError("'" + o.input + "' must contain exactly 4 data rows");
        std::vector<double> betas, lambdas;
        for (const auto& row : rows) {
            if (row.size() < 2)
                throw FormatError("'" + o.input + "' rows need at least beta,lambda columns");
            betas.push_back(row[0]);
            lambdas.push_back(row[1]);
        }
        std::printf("  %-22s %s\n", "beta", "lambda5(K+)");
        for (int i = 0; i < 4; ++i)
            std::printf("  %-22.17g %.17g\n", betas[i], lambdas[i]);
        const std::optional<double> root = cubic_root_from_table(betas, lambdas);
        if (!root) {
            std::cerr << "no unique in-bracket root of the interpolating cubic\n";
            return 1;
        }
        std::printf("  cubic root        %.17g\n", *root);
        if (!o.out.empty()) {
            BetaStarResult r;
            r.beta_star = *root;
            r.from_cubic = true;
            r.bracket_lo = betas.front();
            r.bracket_hi = betas.back();
            r.sample_betas = betas;
            r.sample_lambdas = lambdas;
            write_text_file(o.out, beta_star_csv(r, GridSpec{}));
        }
        return 0;
    }

    apply_threads(o);
    const GridSpec grid = make_grid(o.L, o.N);
    if (o.bracket.size() != 2)
        throw CLI::RequiredError("betastar needs --bracket LO HI (or --table-only)");
    const BetaStarResult r =
        find_beta_star(o.bracket[0], o.bracket[1], grid, gap_params(o), o.beta_tol);

    std::printf("beta-star localization L=%.17g N=%d\n", grid.L, grid.N);
    std::printf("  final bracket     [%.17g, %.17g]\n", r.bracket_lo, r.bracket_hi);
    std::printf("  bisection steps   %d\n", r.bisection_steps);
    std::printf("  %-22s %s\n", "beta", "lambda5(K+)");
    for (std::size_t i = 0; i < r.sample_betas.size(); ++i)
        std::printf("  %-22.17g %.17g\n", r.sample_betas[i], r.sample_lambdas[i]);
    std::printf("  beta_star         %.17g%s\n", r.beta_star,
                r.from_cubic ? "" : "  (bisection midpoint fallback)");
    std::printf("  uncertainty       %.3e\n", r.uncertainty);
    if (!r.detail.empty()) std::printf("  note: %s\n", r.detail.c_str());
    if (!o.out.empty()) write_text_file(o.out, beta_star_csv(r, grid));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"numerical verification of the spectral gap property for the "
                 "linearized cubic-box NLS ground state"};
    app.require_subcommand(1);

    auto add_grid = [&](CLI::App* c) {
        c->add_option("--L", o.L, "box side length");
        c->add_option("--N", o.N, "grid points per axis (even)");
        c->add_option("--threads", o.threads, "FFT thread cap (default: all cores)");
    };
    auto add_soliton = [&](CLI::App* c) {
        c->add_option("--soliton-tol", o.soliton_tol, "soliton residual target");
        c->add_option("--delta", o.delta, "translation-damping constant");
        c->add_flag("--no-aitken", o.no_aitken, "disable Aitken acceleration");
    };
    auto add_eigs = [&](CLI::App* c) {
        c->add_option("--k", o.k, "eigenvalues per operator");
        c->add_option("--tol", o.eig_tol, "eigenpair residual tolerance");
        c->add_option("--seed", o.seed, "eigensolver start-vector seed");
    };

    CLI::App* soliton = app.add_subcommand("soliton", "solve the ground-state profile");
    add_grid(soliton);
    add_soliton(soliton);
    soliton->add_option("--beta", o.beta, "nonlinearity exponent")->required();
    soliton->add_option("--tol", o.soliton_tol, "residual target (alias of --soliton-tol)");
    soliton->add_option("--out", o.out, "write the profile here (plus .csv history)");
    soliton->add_option("--load", o.load, "initial iterate from a field file");

    CLI::App* eigs = app.add_subcommand("eigs", "gap eigenvalues at one beta");
    add_grid(eigs);
    add_soliton(eigs);
    add_eigs(eigs);
    eigs->add_option("--beta", o.beta, "nonlinearity exponent")->required();
    eigs->add_option("--out", o.out, "write the gap report CSV here");
    eigs->add_option("--load", o.load, "soliton warm start from a field file");
    eigs->add_flag("--assert-gap", o.assert_gap, "exit 0 only if the gap property holds");
    eigs->add_flag("--cross-check", o.cross_check, "also solve K+ directly and compare");

    CLI::App* scan = app.add_subcommand("scan", "sweep beta and tabulate gap eigenvalues");
    add_grid(scan);
    add_soliton(scan);
    add_eigs(scan);
    scan->add_option("--beta-min", o.beta_min, "first beta")->required();
    scan->add_option("--beta-max", o.beta_max, "last beta")->required();
    scan->add_option("--steps", o.steps, "number of equispaced betas");
    scan->add_option("--out", o.out, "write the scan CSV here (default: stdout)");
    scan->add_flag("--cold-start", o.cold_start, "do not warm-start successive solitons");

    CLI::App* betastar = app.add_subcommand("betastar", "locate the lambda5(K+) = 1 crossing");
    add_grid(betastar);
    add_soliton(betastar);
    add_eigs(betastar);
    betastar->add_option("--bracket", o.bracket, "beta bracket straddling the crossing")
        ->expected(2);
    betastar->add_option("--beta-tol", o.beta_tol, "bisection bracket width target");
    betastar->add_option("--out", o.out, "write the localization CSV here");
    betastar->add_flag("--table-only", o.table_only,
                       "interpolate a supplied 4-row table, no operator work");
    betastar->add_option("--input", o.input, "CSV with 4 rows of beta,lambda for --table-only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (soliton->parsed()) return cmd_soliton(o);
        if (eigs->parsed())
            return cmd_eigs(o, eigs->count("--L") > 0, eigs->count("--N") > 0);
        if (scan->parsed()) return cmd_scan(o);
        return cmd_betastar(o);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
