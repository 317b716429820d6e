#include "lapse/report.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lapse/errors.hpp"
#include "lapse/parallel.hpp"
#include "lapse/surplus.hpp"
#include "lapse/thiele.hpp"

namespace lapse {

std::size_t CsvTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    return std::string::npos;
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                        : comma - start);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.remove_suffix(1);
        while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
    std::string out;
    if (!table.provenance.empty()) out += table.provenance + '\n';
    append_row(out, table.columns);
    for (const auto& row : table.rows) append_row(out, row);
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (table.provenance.empty()) table.provenance = std::string(line);
            continue;
        }
        auto cells = split(line);
        if (table.columns.empty()) {
            table.columns = std::move(cells);
        } else if (cells.size() != table.columns.size()) {
            throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.columns.size()) + " cells, found " +
                                  std::to_string(cells.size()));
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << to_csv(table);
    if (!out) throw NumericalError("write failed: " + path.string());
}

std::string provenance_line(double step, std::uint64_t seed) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# lapse-engine %.*s step_h=%.10g seed=%llu",
                  static_cast<int>(kEngineVersion.size()), kEngineVersion.data(), step,
                  static_cast<unsigned long long>(seed));
    return buf;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string format_significant(double value, int digits) {
    if (std::abs(value) < 1e-14) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

namespace {

constexpr double kTable1Sum = 250000.0;
constexpr double kPhis[] = {1.0, 2.0, 5.0};
constexpr double kThetas[] = {1.0, 4.0, 10.0};
constexpr double kStressedLapses[] = {0.05, 0.06, 0.07};
constexpr CaseId kStressCases[] = {CaseId::case1_cv, CaseId::case2, CaseId::case3};

std::string case_column(CaseId id, bool differential) {
    std::string name(to_string(id));
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return name + (differential ? "_diff" : "_unif");
}

LapseBehavior mode(bool differential) {
    return differential ? LapseBehavior::differential() : LapseBehavior::uniform();
}

CsvTable table1(const RunOptions& options) {
    CsvTable out;
    out.columns = {"sv_pct",        "delta",          "lapse",        "premium_no_lapse_support",
                   "premium_lapse_supported", "max_profit_pct", "max_loss_pct"};
    struct Cell {
        double k, delta, nu;
    };
    std::vector<Cell> cells;
    for (double k : {0.5, 0.0})
        for (double delta : {0.03, 0.06, 0.09})
            for (double nu : {0.03, 0.06}) cells.push_back({k, delta, nu});
    out.rows.resize(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const auto& c = cells[i];
        const Contract contract =
            term_to_100(35.0, kTable1Sum, SurrenderRule::proportion(c.k));
        const auto gm82 = MortalityModel::gm82_males();
        const Basis no_lapse(c.delta, gm82, LapseModel::zero());
        const Basis with_lapse(c.delta, gm82, LapseModel::constant(c.nu));
        const double p = solve_level_premium(contract, no_lapse, options.step);
        const double p_star = solve_level_premium(contract, with_lapse, options.step);
        const ProfitLoss pl = max_profit_loss(contract, with_lapse, options.step);
        out.rows[i] = {format_fixed(100.0 * c.k, 0), format_fixed(c.delta, 2),
                       format_fixed(c.nu, 2),        format_fixed(p, 2),
                       format_fixed(p_star, 2),      format_fixed(pl.max_profit_pct, 2),
                       format_fixed(pl.max_loss_pct, 2)};
    });
    return out;
}

ScenarioSpec table_spec(const RunOptions& options) {
    ScenarioSpec spec;
    spec.step = options.step;
    return spec;
}

std::vector<CaseValuation> value_cases(std::span<const CaseId> cases, const ScenarioSpec& spec) {
    std::vector<CaseValuation> out;
    out.reserve(cases.size());
    for (CaseId id : cases) out.push_back(value_case(id, spec));
    return out;
}

/// Tables 3 and 4 share a layout: rows (phi, theta), columns case x mode.
CsvTable phi_theta_table(const RunOptions& options, bool second_moment) {
    CsvTable out;
    out.columns = {"phi", "theta"};
    for (CaseId id : kAllCases)
        for (bool diff : {false, true}) out.columns.push_back(case_column(id, diff));

    const ScenarioSpec base = table_spec(options);
    const auto valuations = value_cases(kAllCases, base);
    const std::size_t per_row = std::size(kAllCases) * 2;
    const std::size_t row_count = std::size(kPhis) * std::size(kThetas);
    std::vector<double> values(row_count * per_row);
    parallel_for(values.size(), [&](std::size_t i) {
        const std::size_t row = i / per_row;
        const std::size_t col = i % per_row;
        ScenarioSpec spec = base;
        spec.high_risk.mortality_multiplier = kPhis[row / std::size(kThetas)];
        spec.high_risk.sum_multiple = kThetas[row % std::size(kThetas)];
        spec.high_risk.lapse = mode(col % 2 == 1);
        const auto& valuation = valuations[col / 2];
        spec.case_id = valuation.case_id;
        values[i] = second_moment ? scenario_moments(valuation, spec).sd_ratio
                                  : scenario_epv(valuation, spec).cost_pct;
    });
    for (std::size_t row = 0; row < row_count; ++row) {
        std::vector<std::string> cells{format_significant(kPhis[row / std::size(kThetas)], 6),
                                       format_significant(kThetas[row % std::size(kThetas)], 6)};
        for (std::size_t col = 0; col < per_row; ++col)
            cells.push_back(format_fixed(values[row * per_row + col], 2));
        out.rows.push_back(std::move(cells));
    }
    return out;
}

CsvTable table5(const RunOptions& options) {
    CsvTable out;
    out.columns = {"phi", "nu_tilde"};
    for (CaseId id : kStressCases)
        for (bool diff : {false, true}) out.columns.push_back(case_column(id, diff));

    ScenarioSpec base = table_spec(options);
    base.high_risk.sum_multiple = 1.0;
    const auto valuations = value_cases(kStressCases, base);
    const std::size_t per_row = std::size(kStressCases) * 2;
    const std::size_t row_count = std::size(kPhis) * std::size(kStressedLapses);
    std::vector<double> values(row_count * per_row);
    parallel_for(values.size(), [&](std::size_t i) {
        const std::size_t row = i / per_row;
        const std::size_t col = i % per_row;
        ScenarioSpec spec = base;
        spec.high_risk.mortality_multiplier = kPhis[row / std::size(kStressedLapses)];
        spec.normal.lapse = LapseBehavior::stressed(kStressedLapses[row % std::size(kStressedLapses)]);
        spec.high_risk.lapse = mode(col % 2 == 1);
        const auto& valuation = valuations[col / 2];
        spec.case_id = valuation.case_id;
        values[i] = scenario_epv(valuation, spec).cost_pct;
    });
    for (std::size_t row = 0; row < row_count; ++row) {
        std::vector<std::string> cells{
            format_significant(kPhis[row / std::size(kStressedLapses)], 6),
            format_fixed(kStressedLapses[row % std::size(kStressedLapses)], 2)};
        for (std::size_t col = 0; col < per_row; ++col)
            cells.push_back(format_fixed(values[row * per_row + col], 2));
        out.rows.push_back(std::move(cells));
    }
    return out;
}

std::string rate_expression(CaseId id, const LossRateCoefficients& c) {
    const char* value = id == CaseId::case2 ? "V*" : "V";
    std::string expr = format_significant(c.mortality_coefficient, 5) + " mu1 ";
    expr += id == CaseId::case3 ? std::string("S") : std::string("(S - ") + value + ")";
    if (c.lapse_applies && std::abs(c.lapse_coefficient) >= 5e-6) {
        expr += c.lapse_coefficient < 0 ? " - " : " + ";
        expr += format_significant(std::abs(c.lapse_coefficient), 5) + " " + value;
    }
    return expr;
}

CsvTable table6(const RunOptions& options) {
    CsvTable out;
    out.columns = {"case", "surrender", "lapsing", "mortality_coefficient", "lapse_coefficient",
                   "loss_rate"};
    ScenarioSpec spec = table_spec(options);
    spec.normal.lapse = LapseBehavior::stressed(options.coefficient_lapse);
    constexpr double kPinnedShare = 0.001;
    for (CaseId id : kAllCases) {
        for (bool diff : {false, true}) {
            spec.high_risk.lapse = mode(diff);
            const auto c = loss_rate_coefficients(id, spec, kPinnedShare);
            out.rows.push_back({std::string(to_string(id)), id == CaseId::case1_cv ? "V" : "0",
                                diff ? "diff" : "unif",
                                format_significant(c.mortality_coefficient, 5),
                                format_significant(c.lapse_coefficient, 5), rate_expression(id, c)});
        }
    }
    return out;
}

}  // namespace

CsvTable run_table(int id, const RunOptions& options) {
    CsvTable out;
    switch (id) {
        case 1: out = table1(options); break;
        case 3: out = phi_theta_table(options, false); break;
        case 4: out = phi_theta_table(options, true); break;
        case 5: out = table5(options); break;
        case 6: out = table6(options); break;
        default: throw ValidationError("unknown table id " + std::to_string(id) +
                                       " (expected 1, 3, 4, 5 or 6)");
    }
    out.provenance = provenance_line(options.step, options.seed);
    return out;
}

CsvTable run_figure_losses(const FigureOptions& options) {
    if (options.first_age < 20 || options.last_age > 90 || options.first_age > options.last_age) {
        throw ValidationError("ages must satisfy 20 <= first <= last <= 90");
    }
    if (options.valuation_lapses.empty()) throw ValidationError("no valuation lapse rates given");
    for (double r : options.valuation_lapses) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("lapse rates must be >= 0");
    }
    std::vector<double> ages;
    for (int a = options.first_age; a <= options.last_age; ++a) ages.push_back(a);

    ScenarioSpec base = table_spec(options.run);
    base.high_risk.mortality_multiplier = 5.0;
    base.high_risk.sum_multiple = 10.0;
    const auto rows = age_sweep(kAllCases, base, ages, options.valuation_lapses, options.reading,
                                options.fixed_experience_lapse);

    CsvTable out;
    out.provenance = provenance_line(options.run.step, options.run.seed);
    out.columns = {"age", "case", "lapsing_mode", "valuation_lapse", "cost_pct"};
    for (const auto& r : rows) {
        out.rows.push_back({format_fixed(r.entry_age, 0), std::string(to_string(r.case_id)),
                            r.mode == LapseBehavior::Kind::differential ? "diff" : "unif",
                            format_fixed(r.valuation_lapse, 2), format_fixed(r.cost_pct, 2)});
    }
    return out;
}

Tolerance column_tolerance(int table_id, std::string_view column) {
    switch (table_id) {
        case 1:
            if (column.starts_with("premium")) return {0.002, true};
            return {0.1, false};
        case 3:
        case 5: return {0.05, false};
        case 4: return {0.02, false};
        case 6: return {5e-6, false};
        default: return {0.0, false};
    }
}

std::size_t key_columns(int table_id) {
    switch (table_id) {
        case 1: return 3;
        case 6: return 3;
        default: return 2;
    }
}

namespace {

bool parse_number(const std::string& text, double& value) {
    if (text.empty()) return false;
    char* end = nullptr;
    value = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && std::isfinite(value);
}

bool same_key(const std::string& a, const std::string& b) {
    double x = 0.0, y = 0.0;
    if (parse_number(a, x) && parse_number(b, y)) return std::abs(x - y) <= 1e-9;
    return a == b;
}

}  // namespace

void compare_tables(int table_id, const std::string& file, const CsvTable& expected,
                    const CsvTable& actual, VerifyReport& report) {
    auto fail = [&](std::size_t row, std::string column, std::string want, std::string got,
                    std::string reason) {
        report.failures.push_back({file, row, std::move(column), std::move(want), std::move(got),
                                   std::move(reason)});
    };
    if (expected.rows.size() != actual.rows.size()) {
        fail(0, "", std::to_string(expected.rows.size()), std::to_string(actual.rows.size()),
             "row count differs");
        return;
    }
    const std::size_t keys = key_columns(table_id);
    for (std::size_t c = 0; c < expected.columns.size(); ++c) {
        const std::string& name = expected.columns[c];
        const std::size_t ac = actual.column_index(name);
        if (ac == std::string::npos) {
            fail(0, name, name, "", "column missing from output");
            continue;
        }
        const Tolerance tol = column_tolerance(table_id, name);
        for (std::size_t r = 0; r < expected.rows.size(); ++r) {
            const std::string& want = expected.rows[r][c];
            const std::string& got = actual.rows[r][ac];
            ++report.cells;
            if (c < keys) {
                if (!same_key(want, got)) fail(r + 1, name, want, got, "key mismatch");
                continue;
            }
            double x = 0.0, y = 0.0;
            if (!parse_number(want, x) || !parse_number(got, y)) {
                if (want != got) fail(r + 1, name, want, got, "text mismatch");
                continue;
            }
            const double limit = tol.relative ? tol.value * std::abs(x) : tol.value;
            // Slack so a difference equal to the tolerance, after rounding, passes.
            if (std::abs(x - y) > limit * (1.0 + 1e-9)) {
                char reason[96];
                std::snprintf(reason, sizeof reason, "|diff| %.6g > %s%.6g", std::abs(x - y),
                              tol.relative ? "rel " : "", tol.value);
                fail(r + 1, name, want, got, reason);
            }
        }
    }
}

VerifyReport verify(const std::filesystem::path& dir, const RunOptions& options) {
    if (!std::filesystem::is_directory(dir)) {
        throw ValidationError("not a directory: " + dir.string());
    }
    VerifyReport report;
    for (int id : kTableIds) {
        const std::string file = "table" + std::to_string(id) + ".csv";
        const auto path = dir / file;
        if (!std::filesystem::exists(path)) {
            report.missing.push_back(file);
            continue;
        }
        CsvTable expected;
        try {
            expected = read_csv(path);
        } catch (const ValidationError& e) {
            report.failures.push_back({file, 0, "", "", "", e.what()});
            continue;
        }
        compare_tables(id, file, expected, run_table(id, options), report);
        report.checked.push_back(file);
    }
    return report;
}

}  // namespace lapse
