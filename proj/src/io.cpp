#include "nlsgap/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace nlsgap {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

// file order runs over f = j + N/2 in [0, N); the matching wrap-order index
int axis_map(int f, int N) { return (f + N / 2) % N; }

std::string timestamp_line() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string("# generated: ") + buf + "\n";
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

}  // namespace

void save_field(const RealField& f, const std::string& path) {
    const int N = f.grid.N;
    if (f.samples.size() != f.grid.size())
        throw FormatError("save_field: sample count does not match the grid");
    std::string buf;
    buf.reserve(20 + f.samples.size() * 8);
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_f64(buf, f.grid.L);
    put_u32(buf, static_cast<std::uint32_t>(N));
    for (int f1 = 0; f1 < N; ++f1)
        for (int f2 = 0; f2 < N; ++f2)
            for (int f3 = 0; f3 < N; ++f3)
                put_f64(buf, f.samples[f.grid.lin(axis_map(f1, N), axis_map(f2, N),
                                                  axis_map(f3, N))]);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("save_field: cannot open '" + path + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("save_field: write to '" + path + "' failed");
}

RealField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("load_field: cannot open '" + path + "'");
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 20) throw FormatError("load_field: '" + path + "' is truncated");
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    if (std::memcmp(p, kMagic, 4) != 0)
        throw FormatError("load_field: '" + path + "' is not a field file (bad magic)");
    if (get_u32(p + 4) != kVersion)
        throw FormatError("load_field: unsupported field file version in '" + path + "'");
    const double L = get_f64(p + 8);
    const std::uint32_t Nu = get_u32(p + 16);
    if (Nu == 0 || Nu > 4096) throw FormatError("load_field: implausible N in '" + path + "'");
    const int N = static_cast<int>(Nu);

    GridSpec grid;
    try {
        grid = make_grid(L, N);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("load_field: invalid header: ") + e.what());
    }
    const std::size_t expect = 20 + grid.size() * 8;
    if (raw.size() != expect) {
        std::ostringstream os;
        os << "load_field: '" << path << "' has " << raw.size() << " bytes, expected " << expect;
        throw FormatError(os.str());
    }

    RealField out = make_field(grid);
    const unsigned char* body = p + 20;
    std::size_t pos = 0;
    for (int f1 = 0; f1 < N; ++f1)
        for (int f2 = 0; f2 < N; ++f2)
            for (int f3 = 0; f3 < N; ++f3, pos += 8) {
                const double v = get_f64(body + pos);
                if (!std::isfinite(v))
                    throw FormatError("load_field: non-finite sample in '" + path + "'");
                out.samples[grid.lin(axis_map(f1, N), axis_map(f2, N), axis_map(f3, N))] = v;
            }
    return out;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string soliton_history_csv(const SolitonResult& r, const GridSpec& grid, bool timestamp) {
    std::string s = "# soliton convergence history\n";
    if (timestamp) s += timestamp_line();
    s += "# beta=" + format_real(r.params.beta) + " L=" + format_real(grid.L) +
         " N=" + std::to_string(grid.N) + " delta=" + format_real(r.params.delta) +
         " aitken=" + (r.params.use_aitken ? std::string("1") : std::string("0")) + "\n";
    s += "# converged=" + std::string(r.converged ? "1" : "0") +
         " iterations=" + std::to_string(r.iterations) +
         " aitken_accepted=" + std::to_string(r.aitken_accepted) + "\n";
    if (!r.diagnostic.empty()) s += "# diagnostic: " + one_line(r.diagnostic) + "\n";
    s += "iter,residual,M,R1,R2,R3\n";
    const std::size_t n = std::min({r.residual_history.size(), r.M_history.size(),
                                    r.R_history.size()});
    for (std::size_t i = 0; i < n; ++i) {
        s += std::to_string(i + 1) + "," + format_real(r.residual_history[i]) + "," +
             format_real(r.M_history[i]) + "," + format_real(r.R_history[i][0]) + "," +
             format_real(r.R_history[i][1]) + "," + format_real(r.R_history[i][2]) + "\n";
    }
    return s;
}

std::string gap_report_csv(const GapReport& r, const GridSpec& grid, bool timestamp) {
    std::string s = "# gap report\n";
    if (timestamp) s += timestamp_line();
    s += "# beta=" + format_real(r.beta) + " L=" + format_real(grid.L) +
         " N=" + std::to_string(grid.N) + "\n";
    s += "# verdict_valid=" + std::string(r.verdict_valid ? "1" : "0") +
         " gap_minus_ok=" + (r.gap_minus_ok ? "1" : "0") +
         " gap_plus_ok=" + (r.gap_plus_ok ? "1" : "0") + " gap_ok=" + (r.gap_ok ? "1" : "0") +
         "\n";
    s += "# triplet_spread=" + format_real(r.triplet_spread) + "\n";
    if (r.cross_check_error >= 0.0)
        s += "# cross_check_error=" + format_real(r.cross_check_error) + "\n";
    if (!r.note.empty()) s += "# note: " + one_line(r.note) + "\n";
    s += "index,lambda_minus,lambda_plus,residual\n";
    for (std::size_t i = 0; i < r.lambdas_minus.size(); ++i) {
        const double res = i < r.residuals.size() ? r.residuals[i] : std::nan("");
        s += std::to_string(i + 1) + "," + format_real(r.lambdas_minus[i]) + "," +
             format_real(r.lambdas_plus[i]) + "," + format_real(res) + "\n";
    }
    return s;
}

std::string scan_csv(const std::vector<GapReport>& rows, const GridSpec& grid, bool timestamp) {
    std::string s = "# beta scan\n";
    if (timestamp) s += timestamp_line();
    s += "# L=" + format_real(grid.L) + " N=" + std::to_string(grid.N) + "\n";
    s += "beta,lambda5_plus,lambda2_minus,lambda1_plus,triplet_spread,soliton_residual\n";
    const double nan = std::nan("");
    for (const GapReport& r : rows) {
        if (!r.note.empty())
            s += "# beta=" + format_real(r.beta) + " incomplete: " + one_line(r.note) + "\n";
        const double l5p = r.lambdas_plus.size() > 4 ? r.lambdas_plus[4] : nan;
        const double l2m = r.lambdas_minus.size() > 1 ? r.lambdas_minus[1] : nan;
        const double l1p = !r.lambdas_plus.empty() ? r.lambdas_plus[0] : nan;
        const double sres =
            !r.soliton.residual_history.empty() ? r.soliton.residual_history.back() : nan;
        s += format_real(r.beta) + "," + format_real(l5p) + "," + format_real(l2m) + "," +
             format_real(l1p) + "," + format_real(r.triplet_spread) + "," + format_real(sres) +
             "\n";
    }
    return s;
}

std::string beta_star_csv(const BetaStarResult& r, const GridSpec& grid, bool timestamp) {
    std::string s = "# beta-star localization\n";
    if (timestamp) s += timestamp_line();
    s += "# L=" + format_real(grid.L) + " N=" + std::to_string(grid.N) + "\n";
    s += "# bracket_lo=" + format_real(r.bracket_lo) + " bracket_hi=" + format_real(r.bracket_hi) +
         "\n";
    if (r.cubic_coeffs.size() == 4)
        s += "# cubic (scaled variable): c0=" + format_real(r.cubic_coeffs[0]) +
             " c1=" + format_real(r.cubic_coeffs[1]) + " c2=" + format_real(r.cubic_coeffs[2]) +
             " c3=" + format_real(r.cubic_coeffs[3]) + "\n";
    s += "# beta_star=" + format_real(r.beta_star) + " uncertainty=" + format_real(r.uncertainty) +
         " bisection_steps=" + std::to_string(r.bisection_steps) +
         " from_cubic=" + (r.from_cubic ? "1" : "0") + "\n";
    if (!r.detail.empty()) s += "# detail: " + one_line(r.detail) + "\n";
    s += "beta,lambda5_plus\n";
    for (std::size_t i = 0; i < r.sample_betas.size() && i < r.sample_lambdas.size(); ++i)
        s += format_real(r.sample_betas[i]) + "," + format_real(r.sample_lambdas[i]) + "\n";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        // header lines are recognized by an unparseable first field
        std::vector<double> row;
        bool header = false;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            const std::string cell =
                line.substr(start, comma == std::string::npos ? comma : comma - start);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                if (row.empty()) {
                    header = true;
                    break;
                }
                throw FormatError("parse_csv: bad numeric cell '" + cell + "'");
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!header && !row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace nlsgap
