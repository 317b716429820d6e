#include "lapse/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "lapse/errors.hpp"
#include "lapse/thiele.hpp"

namespace lapse {

namespace {

class Reader {
public:
    explicit Reader(std::string_view origin) : origin_(origin) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                           const std::string& what) const {
        std::string where = origin_;
        if (node.IsDefined() && node.Mark().line >= 0) {
            where += ":" + std::to_string(node.Mark().line + 1);
        }
        throw ValidationError(where + ": field '" + field + "': " + what);
    }

    YAML::Node block(const YAML::Node& parent, const std::string& name, bool required) const {
        const YAML::Node node = parent[name];
        if (!node.IsDefined() || node.IsNull()) {
            if (required) fail(parent, name, "missing required block");
            return YAML::Node(YAML::NodeType::Map);
        }
        if (!node.IsMap()) fail(node, name, "expected a mapping");
        return node;
    }

    void only(const YAML::Node& map, const std::string& prefix,
              std::initializer_list<std::string_view> allowed) const {
        for (const auto& item : map) {
            const auto key = item.first.as<std::string>();
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (!known) fail(item.first, prefix + key, "unknown field");
        }
    }

    std::optional<double> number(const YAML::Node& map, const std::string& prefix,
                                 const std::string& key) const {
        const YAML::Node node = map[key];
        if (!node.IsDefined() || node.IsNull()) return std::nullopt;
        if (!node.IsScalar()) fail(node, prefix + key, "expected a number");
        double value = 0.0;
        if (!YAML::convert<double>::decode(node, value) || !std::isfinite(value)) {
            fail(node, prefix + key, "expected a finite number, got '" + node.Scalar() + "'");
        }
        return value;
    }

    double required_number(const YAML::Node& map, const std::string& prefix,
                           const std::string& key) const {
        auto value = number(map, prefix, key);
        if (!value) fail(map, prefix + key, "missing required field");
        return *value;
    }

    std::optional<std::string> text(const YAML::Node& map, const std::string& prefix,
                                    const std::string& key) const {
        const YAML::Node node = map[key];
        if (!node.IsDefined() || node.IsNull()) return std::nullopt;
        if (!node.IsScalar()) fail(node, prefix + key, "expected a string");
        return node.Scalar();
    }

    std::optional<std::uint64_t> count(const YAML::Node& map, const std::string& prefix,
                                       const std::string& key) const {
        const YAML::Node node = map[key];
        if (!node.IsDefined() || node.IsNull()) return std::nullopt;
        std::uint64_t value = 0;
        if (!node.IsScalar() || !YAML::convert<std::uint64_t>::decode(node, value)) {
            fail(node, prefix + key, "expected a non-negative integer");
        }
        return value;
    }

private:
    std::string origin_;
};

void check(bool ok, const std::string& rule) {
    if (!ok) throw ValidationError("invalid scenario: " + rule);
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view origin) {
    const Reader in(origin);
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ValidationError(std::string(origin) + ":" + std::to_string(e.mark.line + 1) +
                              ": malformed document: " + e.msg);
    }
    if (!root.IsMap()) throw ValidationError(std::string(origin) + ": expected a mapping at top level");
    in.only(root, "", {"contract", "pricing", "experience", "run"});

    ScenarioConfig config;
    ScenarioSpec& spec = config.spec;

    const auto contract = in.block(root, "contract", true);
    in.only(contract, "contract.", {"entry_age", "end_age", "sum_insured", "maturity", "surrender"});
    spec.entry_age = in.required_number(contract, "contract.", "entry_age");
    spec.end_age = in.required_number(contract, "contract.", "end_age");
    spec.sum_insured = in.number(contract, "contract.", "sum_insured").value_or(1.0);
    spec.maturity = in.number(contract, "contract.", "maturity");
    const auto surrender = in.block(contract, "surrender", false);
    in.only(surrender, "contract.surrender.", {"kind", "k"});
    const std::string kind = in.text(surrender, "contract.surrender.", "kind").value_or("zero");
    if (kind == "zero") {
        if (surrender["k"].IsDefined()) in.fail(surrender["k"], "contract.surrender.k", "not allowed with kind zero");
    } else if (kind == "proportion") {
        const double k = in.required_number(surrender, "contract.surrender.", "k");
        if (!(k >= 0.0 && k <= 1.0)) in.fail(surrender["k"], "contract.surrender.k", "must lie in [0, 1]");
        config.surrender = SurrenderRule::proportion(k);
    } else {
        in.fail(surrender["kind"], "contract.surrender.kind", "expected 'zero' or 'proportion'");
    }

    const auto pricing = in.block(root, "pricing", true);
    in.only(pricing, "pricing.", {"delta", "lapse_rate", "regime"});
    spec.delta = in.required_number(pricing, "pricing.", "delta");
    spec.valuation_lapse = in.number(pricing, "pricing.", "lapse_rate").value_or(0.0);
    const auto regime = in.text(pricing, "pricing.", "regime");
    if (!regime) in.fail(pricing, "pricing.regime", "missing required field");
    const auto id = parse_case_id(*regime);
    if (!id) in.fail(pricing["regime"], "pricing.regime", "expected case1_C0, case1_CV, case2 or case3");
    spec.case_id = *id;

    const auto experience = in.block(root, "experience", false);
    in.only(experience, "experience.", {"lapse_normal", "lapse_high_risk", "mortality_multiplier",
                                        "sum_multiple", "initial_proportion"});
    if (auto r = in.number(experience, "experience.", "lapse_normal")) {
        if (*r < 0.0) in.fail(experience["lapse_normal"], "experience.lapse_normal", "must be >= 0");
        spec.normal.lapse = LapseBehavior::stressed(*r);
    }
    if (const YAML::Node node = experience["lapse_high_risk"]; node.IsDefined() && !node.IsNull()) {
        if (!node.IsScalar()) in.fail(node, "experience.lapse_high_risk", "expected a mode or a rate");
        double rate = 0.0;
        if (node.Scalar() == "uniform") {
            spec.high_risk.lapse = LapseBehavior::uniform();
        } else if (node.Scalar() == "differential") {
            spec.high_risk.lapse = LapseBehavior::differential();
        } else if (YAML::convert<double>::decode(node, rate) && rate >= 0.0 && std::isfinite(rate)) {
            spec.high_risk.lapse = LapseBehavior::stressed(rate);
        } else {
            in.fail(node, "experience.lapse_high_risk",
                    "expected 'uniform', 'differential' or a rate >= 0");
        }
    }
    spec.high_risk.mortality_multiplier =
        in.number(experience, "experience.", "mortality_multiplier").value_or(spec.high_risk.mortality_multiplier);
    spec.high_risk.sum_multiple =
        in.number(experience, "experience.", "sum_multiple").value_or(spec.high_risk.sum_multiple);
    spec.high_risk.initial_proportion =
        in.number(experience, "experience.", "initial_proportion").value_or(spec.high_risk.initial_proportion);

    const auto run = in.block(root, "run", false);
    in.only(run, "run.", {"step_h", "output_path", "seed", "simulate_paths"});
    spec.step = in.number(run, "run.", "step_h").value_or(kDefaultStep);
    config.output_path = in.text(run, "run.", "output_path").value_or("");
    config.seed = in.count(run, "run.", "seed").value_or(0);
    config.simulate_paths = in.count(run, "run.", "simulate_paths");

    check(spec.end_age > spec.entry_age, "end_age must exceed entry_age");
    check(spec.delta >= 0.0, "pricing.delta must be >= 0");
    check(spec.valuation_lapse >= 0.0, "pricing.lapse_rate must be >= 0");
    check(spec.high_risk.mortality_multiplier >= 0.0, "experience.mortality_multiplier must be >= 0");
    check(spec.high_risk.sum_multiple >= 0.0, "experience.sum_multiple must be >= 0");
    check(spec.high_risk.initial_proportion >= 0.0 && spec.high_risk.initial_proportion <= 1.0,
          "experience.initial_proportion must lie in [0, 1]");
    check(spec.step > 0.0, "run.step_h must be > 0");
    check(!config.simulate_paths || *config.simulate_paths > 0, "run.simulate_paths must be > 0");

    const double k = config.surrender.k();
    switch (spec.case_id) {
        case CaseId::case1_c0:
        case CaseId::case2:
            check(k == 0.0, std::string(to_string(spec.case_id)) + " pays no surrender value (contract.surrender)");
            break;
        case CaseId::case1_cv:
            check(k == 1.0, "case1_CV pays the full policy value on surrender (contract.surrender.k = 1)");
            break;
        case CaseId::case3:
            check(k == 0.0, "case3 requires a zero surrender rule (contract.surrender)");
            break;
    }
    spec.validate();
    return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.string());
}

ScenarioSummary run_scenario(const ScenarioConfig& config) {
    const ScenarioSpec& spec = config.spec;
    const double term = spec.end_age - spec.entry_age;
    const Contract priced(spec.entry_age, term, spec.sum_insured,
                          spec.maturity.value_or(spec.sum_insured), config.surrender);
    const Basis no_lapse(spec.delta, spec.mortality, LapseModel::zero());
    const Basis with_lapse(spec.delta, spec.mortality, LapseModel::constant(spec.valuation_lapse));

    ScenarioSummary out{};
    out.premium_no_lapse = solve_level_premium(priced, no_lapse, spec.step);
    out.premium_lapse_supported = solve_level_premium(priced, with_lapse, spec.step);

    const CaseValuation valuation = value_case(spec.case_id, spec);
    const ScenarioResult result = scenario_epv(valuation, spec);
    const ScenarioMoments moments = scenario_moments(valuation, spec);
    out.premium_charged = result.premium;
    out.epv_premiums = result.epv_premiums;
    out.epv_loss = result.epv_loss;
    out.cost_pct = result.cost_pct;
    out.sd_ratio = moments.sd_ratio;

    if (config.simulate_paths) {
        const double sum = valuation.contract.sum_insured;
        const ClassBases bases = class_bases(spec);
        const double pi0 = spec.high_risk.initial_proportion;
        const SimulationClass classes[] = {
            {1.0 - pi0, spec.normal.sum_multiple, bases.normal},
            {pi0, spec.high_risk.sum_multiple, bases.high_risk},
        };
        const RateFunction unit_premium = [rate = valuation.policy.premium_rate, sum](double t) {
            return rate(t) / sum;
        };
        out.simulation = simulate_mixture(valuation.contract.scaled(1.0 / sum),
                                          valuation.premium_basis, unit_premium, classes,
                                          *config.simulate_paths, config.seed, spec.step);
        out.simulated_sd_ratio = out.simulation->sd * sum / result.epv_premiums;
    }

    CsvTable& table = out.decomposition;
    table.provenance = provenance_line(spec.step, config.seed);
    table.columns = {"t", "pi", "mortality_rate", "lapse_rate"};
    const DurationGrid& grid = valuation.policy.grid;
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / grid.step())));
    for (std::size_t i = 0; i < grid.size(); i += stride) {
        table.rows.push_back({format_fixed(grid.time(i), 2), format_significant(result.pi_path[i], 8),
                              format_significant(result.decomposition[i].mortality, 8),
                              format_significant(result.decomposition[i].lapse, 8)});
    }
    return out;
}

std::string format_summary(const ScenarioConfig& config, const ScenarioSummary& s) {
    const ScenarioSpec& spec = config.spec;
    std::string out;
    char line[160];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(line, sizeof line, fmt, args...);
        out += line;
        out += '\n';
    };
    add("regime            %.*s", static_cast<int>(to_string(spec.case_id).size()),
        to_string(spec.case_id).data());
    add("entry_age         %g (cover to %g)", spec.entry_age, spec.end_age);
    add("P                 %.8g", s.premium_no_lapse);
    add("P*                %.8g", s.premium_lapse_supported);
    add("charged premium   %.8g", s.premium_charged);
    add("EPV[premiums]     %.6g", s.epv_premiums);
    add("EPV[surplus]      %.6g", s.epv_loss);
    add("cost_pct          %.2f", s.cost_pct);
    add("sd/EPV[premiums]  %.2f", s.sd_ratio);
    if (s.simulation) {
        add("simulated sd/EPV  %.2f +/- %.2f (%llu paths, seed %llu)", *s.simulated_sd_ratio,
            s.simulation->sd_standard_error * spec.sum_insured / s.epv_premiums,
            static_cast<unsigned long long>(s.simulation->paths),
            static_cast<unsigned long long>(config.seed));
    }
    return out;
}

}  // namespace lapse
