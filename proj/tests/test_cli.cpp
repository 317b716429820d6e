#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lapse/config.hpp"
#include "lapse/errors.hpp"
#include "lapse/report.hpp"
#include "support.hpp"

using namespace lapse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lapse-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void copy_golden(const fs::path& to) {
    for (int id : kTableIds) {
        const std::string name = "table" + std::to_string(id) + ".csv";
        fs::copy_file(fs::path(LAPSE_GOLDEN_DIR) / name, to / name);
    }
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string command = std::string(LAPSE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kBaselineYaml = R"(contract:
  entry_age: 35
  end_age: 100
  sum_insured: 1
  surrender: {kind: zero}
pricing:
  delta: 0.05
  lapse_rate: 0.06
  regime: case2
experience:
  lapse_high_risk: differential
  mortality_multiplier: 5
  sum_multiple: 10
  initial_proportion: 0.001
)";

}  // namespace

TEST_CASE("table layouts") {
    const auto t1 = run_table(1);
    CHECK(t1.rows.size() == 12);
    CHECK(t1.columns.front() == "sv_pct");
    CHECK(t1.provenance.rfind("# lapse-engine", 0) == 0);

    const auto t3 = run_table(3);
    CHECK(t3.columns.size() == 10);
    CHECK(t3.columns[2] == "case1_c0_unif");
    CHECK(t3.column_index("case3_diff") == 9);
    CHECK(t3.column_index("nope") == std::string::npos);

    const auto t6 = run_table(6);
    CHECK(t6.rows.size() > 0);
    bool found = false;
    for (const auto& row : t6.rows) {
        for (const auto& cell : row) found = found || cell.find("0.01009 V*") != std::string::npos;
    }
    CHECK(found);

    CHECK_THROWS_AS((void)run_table(2), ValidationError);
    CHECK_THROWS_AS((void)run_table(7), ValidationError);
}

TEST_CASE("number formatting") {
    CHECK(format_fixed(-0.0001, 2) == "0.00");
    CHECK(format_fixed(-6.574, 2) == "-6.57");
    CHECK(format_fixed(3744.4746, 2) == "3744.47");
    CHECK(format_significant(1e-16, 4) == "0");
    CHECK(format_significant(0.0100900001, 4) == "0.01009");
}

TEST_CASE("csv round trip and ragged rows") {
    const CsvTable table{"# provenance", {"a", "b"}, {{"1", "2"}, {"3", "4"}}};
    const auto back = parse_csv(to_csv(table));
    CHECK(back.columns == table.columns);
    CHECK(back.rows == table.rows);
    CHECK_THROWS_AS((void)parse_csv("a,b\n1,2,3\n"), ValidationError);

    const fs::path dir = scratch("csv");
    write_csv(table, dir / "nested" / "t.csv");
    CHECK(read_csv(dir / "nested" / "t.csv").rows == table.rows);
}

TEST_CASE("verify against the reference tables") {
    const fs::path dir = scratch("verify");
    copy_golden(dir);
    const auto pristine = verify(dir);
    CHECK(pristine.passed());
    CHECK(pristine.checked.size() == 5);
    CHECK(pristine.cells > 300);

    // A large perturbation of one cell is caught.
    auto t3 = read_csv(dir / "table3.csv");
    const double original = std::stod(t3.rows[2][7]);
    t3.rows[2][7] = format_fixed(original + 1.0, 2);
    write_csv(t3, dir / "table3.csv");
    const auto perturbed = verify(dir);
    REQUIRE(perturbed.failures.size() == 1);
    CHECK(perturbed.failures[0].file == "table3.csv");
    CHECK(perturbed.failures[0].row == 3);
    CHECK(perturbed.failures[0].column == t3.columns[7]);

    // A perturbation below the tolerance is not.
    t3.rows[2][7] = format_fixed(original + 0.01, 2);
    write_csv(t3, dir / "table3.csv");
    CHECK(verify(dir).passed());

    fs::remove(dir / "table5.csv");
    const auto missing = verify(dir);
    CHECK_FALSE(missing.passed());
    REQUIRE(missing.missing.size() == 1);
    CHECK(missing.missing[0] == "table5.csv");

    CHECK_THROWS_AS((void)verify(dir / "absent"), ValidationError);
}

TEST_CASE("output is deterministic across worker counts") {
    ::setenv("LAPSE_WORKERS", "1", 1);
    FigureOptions options;
    options.first_age = 30;
    options.last_age = 40;
    const std::string one = to_csv(run_figure_losses(options));
    const std::string t4_one = to_csv(run_table(4));
    ::setenv("LAPSE_WORKERS", "4", 1);
    const std::string four = to_csv(run_figure_losses(options));
    const std::string t4_four = to_csv(run_table(4));
    ::unsetenv("LAPSE_WORKERS");
    CHECK(one == four);
    CHECK(t4_one == t4_four);
}

TEST_CASE("figure rows and bounds") {
    FigureOptions options;
    options.first_age = 25;
    options.last_age = 27;
    const auto table = run_figure_losses(options);
    CHECK(table.rows.size() == 3 * 3 * 4 * 2);

    options.first_age = 19;
    CHECK_THROWS_AS((void)run_figure_losses(options), ValidationError);
    options.first_age = 50;
    options.last_age = 40;
    CHECK_THROWS_AS((void)run_figure_losses(options), ValidationError);
}

TEST_CASE("scenario parse errors name field and line") {
    try {
        (void)parse_scenario("contract:\n  entry_age: 35\n  end_age: abc\npricing: {delta: 0.05, lapse_rate: 0.06, regime: case2}\n",
                             "s.yaml");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("contract.end_age") != std::string::npos);
        CHECK(what.find("s.yaml:3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_scenario("pricing: {delta: 0.05, lapse_rate: 0.06, regime: case2}\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_scenario(std::string(kBaselineYaml) + "extra: 1\n"), ValidationError);

    std::string bad_rate = kBaselineYaml;
    bad_rate.replace(bad_rate.find("delta: 0.05"), 11, "delta: -0.05");
    CHECK_THROWS_AS((void)parse_scenario(bad_rate), ValidationError);

    std::string bad_rule = kBaselineYaml;
    bad_rule.replace(bad_rule.find("{kind: zero}"), 12, "{kind: proportion, k: 1}");
    CHECK_THROWS_AS((void)parse_scenario(bad_rule), ValidationError);
}

TEST_CASE("scenario runs") {
    const auto summary = run_scenario(parse_scenario(kBaselineYaml));
    CHECK(std::abs(summary.cost_pct + 6.57) <= 0.05);
    CHECK(summary.decomposition.columns.size() == 4);
    CHECK(summary.decomposition.rows.size() == 66);
    CHECK_FALSE(summary.simulation.has_value());

    const auto full = run_scenario(load_scenario(fs::path(LAPSE_SCENARIO_DIR) / "full_surrender_value.yaml"));
    CHECK(full.premium_lapse_supported == full.premium_no_lapse);
    CHECK(std::abs(full.premium_no_lapse - 3744.44) <= 0.002 * 3744.44);
    REQUIRE(full.simulation.has_value());
    CHECK(std::abs(*full.simulated_sd_ratio - full.sd_ratio) <=
          3.0 * full.simulation->sd_standard_error * 250000.0 / full.epv_premiums + 1e-12);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    const fs::path log = dir / "log.txt";
    CHECK(run_cli("--help", log) == 0);
    CHECK(run_cli("", log) == 2);
    CHECK(run_cli("table 7", log) == 2);
    CHECK(run_cli("table x", log) == 2);
    CHECK(run_cli("figure losses --ages 10:30", log) == 2);
    CHECK(run_cli("figure losses --ages 30", log) == 2);
    CHECK(run_cli("scenario run " + (fs::path(LAPSE_SCENARIO_DIR) / "invalid_age_range.yaml").string(), log) == 2);
    CHECK(run_cli("scenario run " + (dir / "absent.yaml").string(), log) == 2);
    CHECK(run_cli("verify " + (dir / "absent").string(), log) == 2);

    CHECK(run_cli("table 1 --out " + (dir / "t1.csv").string(), log) == 0);
    const std::string written = slurp(dir / "t1.csv");
    CHECK(written.rfind("# lapse-engine", 0) == 0);
    CHECK(written.find("sv_pct,delta,lapse") != std::string::npos);

    const fs::path golden = dir / "golden";
    fs::create_directories(golden);
    copy_golden(golden);
    CHECK(run_cli("verify " + golden.string(), log) == 0);
    fs::remove(golden / "table6.csv");
    CHECK(run_cli("verify " + golden.string(), log) == 1);
}
