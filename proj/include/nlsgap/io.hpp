#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nlsgap/gap_analysis.hpp"
#include "nlsgap/grid.hpp"
#include "nlsgap/soliton.hpp"

namespace nlsgap {

// Malformed or unreadable files (bad magic, truncation, unwritable path).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary field file: magic "NLSF", version u32 = 1, L as f64, N as u32,
// then N^3 f64 samples, everything little-endian. Samples are stored in
// ascending signed-index order, row-major over (j1, j2, j3) with j3 fastest,
// -N/2 <= j < N/2; conversion from the in-memory wrap-around order happens
// here. Round-trips are bit-exact.
void save_field(const RealField& f, const std::string& path);
RealField load_field(const std::string& path);

// Full 17-significant-digit decimal; round-trips any finite double.
std::string format_real(double v);

// CSV reports. Comment lines start with '#'; the generation timestamp (the
// only run-dependent line) is emitted only when `timestamp` is set, so two
// runs with identical config and seed produce byte-identical CSV otherwise.
std::string soliton_history_csv(const SolitonResult& r, const GridSpec& grid,
                                bool timestamp = true);
std::string gap_report_csv(const GapReport& r, const GridSpec& grid, bool timestamp = true);
std::string scan_csv(const std::vector<GapReport>& rows, const GridSpec& grid,
                     bool timestamp = true);
std::string beta_star_csv(const BetaStarResult& r, const GridSpec& grid, bool timestamp = true);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Data rows of a CSV: '#' comments and the column-name header are skipped,
// every remaining line must be comma-separated numbers.
std::vector<std::vector<double>> parse_csv(const std::string& text);

}  // namespace nlsgap
