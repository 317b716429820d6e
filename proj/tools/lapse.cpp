// Command-line front end: tables, the entry-age sweep, scenario files and
// reference comparison.
//
// Exit codes: 0 success, 1 engine or numerical failure (including a failed
// verification), 2 usage or validation error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "lapse/config.hpp"
#include "lapse/errors.hpp"
#include "lapse/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kEngineError = 1;
constexpr int kUsageError = 2;

void emit(const lapse::CsvTable& table, const std::string& out) {
    if (out.empty()) {
        std::cout << lapse::to_csv(table);
    } else {
        lapse::write_csv(table, out);
    }
}

std::pair<int, int> parse_ages(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw lapse::ValidationError("--ages expects A:B, got '" + text + "'");
    try {
        std::size_t used = 0;
        const int a = std::stoi(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(text);
        const std::string rest = text.substr(colon + 1);
        const int b = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(text);
        return {a, b};
    } catch (const std::exception&) {
        throw lapse::ValidationError("--ages expects integer ages A:B, got '" + text + "'");
    }
}

int report_verification(const lapse::VerifyReport& report) {
    for (const auto& file : report.checked) std::cout << "checked " << file << '\n';
    for (const auto& file : report.missing) std::cout << "MISSING " << file << '\n';
    for (const auto& f : report.failures) {
        std::cout << "FAIL " << f.file;
        if (f.row) std::cout << " row " << f.row;
        if (!f.column.empty()) std::cout << " column " << f.column;
        std::cout << ": expected " << f.expected << ", got " << f.actual << " (" << f.reason << ")\n";
    }
    std::cout << (report.passed() ? "PASS" : "FAIL") << ": " << report.cells << " cells, "
              << report.failures.size() << " failures, " << report.missing.size()
              << " missing files\n";
    return report.passed() ? kOk : kEngineError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lapse-supported premiums, surplus and adverse-selection costs"};
    app.require_subcommand(1);

    double step = lapse::kDefaultStep;
    app.add_option("--step", step, "ODE and quadrature step in years")->check(CLI::PositiveNumber);

    int table_id = 0;
    std::string table_out;
    double coefficient_lapse = 0.05;
    auto* table = app.add_subcommand("table", "regenerate a reference table as CSV");
    table->add_option("id", table_id, "table id: 1, 3, 4, 5 or 6")->required();
    table->add_option("--out", table_out, "write to PATH instead of standard output");
    table->add_option("--coefficient-lapse", coefficient_lapse,
                      "normal-class experience lapse rate for table 6");

    auto* figure = app.add_subcommand("figure", "regenerate a figure's data as CSV");
    figure->require_subcommand(1);
    auto* losses = figure->add_subcommand("losses", "adverse-selection cost by entry age");
    std::string ages = "25:75";
    std::vector<double> lapses{0.03, 0.06, 0.09};
    std::string experience = "follows";
    double fixed_lapse = 0.06;
    std::string figure_out;
    losses->add_option("--ages", ages, "entry ages A:B");
    losses->add_option("--lapse", lapses, "valuation lapse rates")->delimiter(',');
    losses->add_option("--experience", experience,
                       "normal-class experience lapse: follows the valuation rate, or fixed")
        ->check(CLI::IsMember({"follows", "fixed"}));
    losses->add_option("--fixed-lapse", fixed_lapse, "experience lapse rate when --experience fixed");
    losses->add_option("--out", figure_out, "write to PATH instead of standard output");

    auto* scenario = app.add_subcommand("scenario", "scenario files");
    scenario->require_subcommand(1);
    auto* scenario_run = scenario->add_subcommand("run", "run a scenario file");
    std::string scenario_file;
    std::string scenario_out;
    scenario_run->add_option("file", scenario_file, "scenario file")->required();
    scenario_run->add_option("--out", scenario_out, "decomposition CSV path (overrides run.output_path)");

    auto* verify = app.add_subcommand("verify", "compare regenerated tables with reference CSVs");
    std::string golden_dir;
    verify->add_option("dir", golden_dir, "directory holding table<id>.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        lapse::RunOptions options;
        options.step = step;
        if (*table) {
            options.coefficient_lapse = coefficient_lapse;
            emit(lapse::run_table(table_id, options), table_out);
        } else if (*losses) {
            lapse::FigureOptions fig;
            std::tie(fig.first_age, fig.last_age) = parse_ages(ages);
            fig.valuation_lapses = lapses;
            fig.reading = experience == "fixed" ? lapse::ExperienceReading::fixed
                                                : lapse::ExperienceReading::follows_valuation;
            fig.fixed_experience_lapse = fixed_lapse;
            fig.run = options;
            emit(lapse::run_figure_losses(fig), figure_out);
        } else if (*scenario_run) {
            auto config = lapse::load_scenario(scenario_file);
            if (step != lapse::kDefaultStep) config.spec.step = step;
            if (!scenario_out.empty()) config.output_path = scenario_out;
            const auto summary = lapse::run_scenario(config);
            std::cout << lapse::format_summary(config, summary);
            if (!config.output_path.empty()) {
                lapse::write_csv(summary.decomposition, config.output_path);
                std::cout << "decomposition     " << config.output_path.string() << '\n';
            }
        } else if (*verify) {
            return report_verification(lapse::verify(golden_dir, options));
        }
        return kOk;
    } catch (const std::logic_error& e) {
        // ValidationError, DomainError and UnsupportedError: bad input.
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngineError;
    }
}
