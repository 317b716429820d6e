#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lapse/advsel.hpp"
#include "lapse/contracts.hpp"
#include "lapse/moments.hpp"
#include "lapse/report.hpp"

namespace lapse {

/// A scenario file, e.g.
///
///   contract:   {entry_age: 35, end_age: 100, sum_insured: 1,
///                surrender: {kind: proportion, k: 1}}
///   pricing:    {delta: 0.05, lapse_rate: 0.06, regime: case1_CV}
///   experience: {lapse_normal: 0.06, lapse_high_risk: differential,
///                mortality_multiplier: 5, sum_multiple: 10,
///                initial_proportion: 0.001}
///   run:        {output_path: out/decomposition.csv, seed: 1}
///
/// contract.maturity defaults to the sum insured, experience.lapse_normal to
/// the pricing lapse rate and run.step_h to 1/240. lapse_high_risk is
/// `uniform`, `differential` or a rate. run.simulate_paths, if present, adds a
/// Monte Carlo check of the standard deviation.
struct ScenarioConfig {
    ScenarioSpec spec;
    SurrenderRule surrender = SurrenderRule::zero();
    std::filesystem::path output_path;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> simulate_paths;
};

/// Parse errors name the offending field and its line; rule violations
/// (rates < 0, end_age <= entry_age, a surrender rule the regime does not
/// allow, ...) name the rule. Both throw ValidationError.
ScenarioConfig parse_scenario(std::string_view text, std::string_view origin = "<input>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct ScenarioSummary {
    double premium_no_lapse;         ///< P, level, no lapses in the basis
    double premium_lapse_supported;  ///< P*, level, pricing lapse rate and surrender rule
    double premium_charged;          ///< regime's premium rate at issue
    double epv_premiums;
    double epv_loss;
    double cost_pct;
    double sd_ratio;
    std::optional<SimulationResult> simulation;  ///< in units of the sum insured
    std::optional<double> simulated_sd_ratio;
    CsvTable decomposition;  ///< annual durations: t, pi, mortality and lapse loss rates
};

ScenarioSummary run_scenario(const ScenarioConfig& config);

std::string format_summary(const ScenarioConfig& config, const ScenarioSummary& summary);

}  // namespace lapse
