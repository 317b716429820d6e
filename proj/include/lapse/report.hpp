#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lapse/advsel.hpp"
#include "lapse/grid.hpp"

namespace lapse {

inline constexpr std::string_view kEngineVersion = "1.0.0";

/// A CSV document: one provenance comment line, a header row, then data rows.
/// Cells are stored already formatted so that output is byte-stable.
struct CsvTable {
    std::string provenance;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(std::string_view name) const;  ///< npos if absent
};

std::string to_csv(const CsvTable& table);

/// Parses CSV text, skipping blank lines and lines starting with '#'.
/// Throws ValidationError on ragged rows.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

std::string provenance_line(double step, std::uint64_t seed);

/// Fixed-point with `decimals` places; negative zero is printed as zero.
std::string format_fixed(double value, int decimals);
/// `digits` significant digits, shortest form.
std::string format_significant(double value, int digits);

struct RunOptions {
    double step = kDefaultStep;
    std::uint64_t seed = 0;
    double coefficient_lapse = 0.05;  ///< normal-class experience lapse for table 6
};

inline constexpr int kTableIds[] = {1, 3, 4, 5, 6};

/// Regenerates one of the reference tables. Throws ValidationError for an
/// unknown id.
CsvTable run_table(int id, const RunOptions& options = {});

struct FigureOptions {
    int first_age = 25;
    int last_age = 75;
    std::vector<double> valuation_lapses{0.03, 0.06, 0.09};
    ExperienceReading reading = ExperienceReading::follows_valuation;
    double fixed_experience_lapse = 0.06;
    RunOptions run;
};

/// Long-format entry-age sweep of the adverse-selection cost for the extreme
/// scenario (phi = 5, theta = 10). Ages must lie in [20, 90].
CsvTable run_figure_losses(const FigureOptions& options = {});

/// Comparison tolerance for a value column of a reference table.
struct Tolerance {
    double value;
    bool relative;
};

Tolerance column_tolerance(int table_id, std::string_view column);
/// Number of leading identifying columns in a table (compared exactly).
std::size_t key_columns(int table_id);

struct CellFailure {
    std::string file;
    std::size_t row;  ///< 1-based data row
    std::string column;
    std::string expected;
    std::string actual;
    std::string reason;
};

struct VerifyReport {
    std::vector<std::string> checked;
    std::vector<std::string> missing;
    std::vector<CellFailure> failures;
    std::size_t cells = 0;

    bool passed() const noexcept { return missing.empty() && failures.empty(); }
};

/// Compares a computed table against a reference, cell by cell.
void compare_tables(int table_id, const std::string& file, const CsvTable& expected,
                    const CsvTable& actual, VerifyReport& report);

/// Recomputes every table and compares it with table<id>.csv in `dir`.
/// Missing files are reported, not thrown.
VerifyReport verify(const std::filesystem::path& dir, const RunOptions& options = {});

}  // namespace lapse
