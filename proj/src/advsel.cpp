#include "lapse/advsel.hpp"

#include <cmath>

#include "lapse/errors.hpp"
#include "lapse/parallel.hpp"

namespace lapse {

std::string_view to_string(CaseId id) noexcept {
    switch (id) {
        case CaseId::case1_c0: return "case1_C0";
        case CaseId::case1_cv: return "case1_CV";
        case CaseId::case2: return "case2";
        case CaseId::case3: return "case3";
    }
    return "unknown";
}

std::optional<CaseId> parse_case_id(std::string_view text) noexcept {
    for (CaseId id : kAllCases) {
        if (text == to_string(id)) return id;
    }
    if (text == "case1_c0") return CaseId::case1_c0;
    if (text == "case1_cv") return CaseId::case1_cv;
    return std::nullopt;
}

LapseBehavior LapseBehavior::stressed(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ValidationError("lapse behavior: stressed rate must be >= 0");
    }
    return {Kind::stressed, rate};
}

void ScenarioSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("scenario: ") + what);
    };
    require(end_age > entry_age, "end_age must exceed entry_age");
    require(entry_age >= 0.0 && end_age <= kMaxAge, "ages must lie in [0, 120]");
    require(sum_insured > 0.0, "sum_insured must be > 0");
    require(!maturity || *maturity >= 0.0, "maturity must be >= 0");
    require(delta >= 0.0, "delta must be >= 0");
    require(valuation_lapse >= 0.0, "valuation lapse rate must be >= 0");
    for (const auto* sub : {&normal, &high_risk}) {
        require(sub->mortality_multiplier >= 0.0, "mortality multiplier must be >= 0");
        require(sub->sum_multiple >= 0.0, "sum multiple must be >= 0");
        require(sub->lapse.rate >= 0.0, "lapse rates must be >= 0");
    }
    require(high_risk.initial_proportion >= 0.0 && high_risk.initial_proportion <= 1.0,
            "initial proportion must lie in [0, 1]");
    require(step > 0.0 && step <= end_age - entry_age, "step must lie in (0, term]");
}

namespace {

double resolve_normal_lapse(const ScenarioSpec& spec) {
    return spec.normal.lapse.kind == LapseBehavior::Kind::stressed ? spec.normal.lapse.rate
                                                                   : spec.valuation_lapse;
}

double resolve_high_risk_lapse(const ScenarioSpec& spec, double normal_lapse) {
    switch (spec.high_risk.lapse.kind) {
        case LapseBehavior::Kind::uniform: return normal_lapse;
        case LapseBehavior::Kind::differential: return 0.0;
        case LapseBehavior::Kind::stressed: return spec.high_risk.lapse.rate;
    }
    return normal_lapse;
}

MortalityModel class_mortality(const ScenarioSpec& spec, double multiplier) {
    return multiplier == 1.0 ? spec.mortality : MortalityModel::scaled(spec.mortality, multiplier);
}

bool has_lapse_surplus(CaseId id) { return id == CaseId::case1_c0 || id == CaseId::case2; }

double pi_from(double pi0, double normal_in_force, double high_in_force) {
    const double high = pi0 * high_in_force;
    const double total = (1.0 - pi0) * normal_in_force + high;
    return total > 0.0 ? high / total : 0.0;
}

struct ClassDiscounts {
    std::vector<double> normal;
    std::vector<double> high_risk;
};

ClassDiscounts class_discounts(const CaseValuation& valuation, const ClassBases& bases) {
    const double x = valuation.contract.entry_age;
    return {survivorship_path(bases.normal, x, valuation.policy.grid),
            survivorship_path(bases.high_risk, x, valuation.policy.grid)};
}

double premium_epv(const CaseValuation& valuation, const ScenarioSpec& spec,
                   const ClassDiscounts& discounts) {
    const auto& premium = valuation.policy.premium;
    std::vector<double> a(premium.size()), b(premium.size());
    for (std::size_t i = 0; i < premium.size(); ++i) {
        a[i] = discounts.normal[i] * premium[i];
        b[i] = discounts.high_risk[i] * premium[i];
    }
    const double h = valuation.policy.grid.step();
    const double pi0 = spec.high_risk.initial_proportion;
    return (1.0 - pi0) * spec.normal.sum_multiple * trapezoid(a, h) +
           pi0 * spec.high_risk.sum_multiple * trapezoid(b, h);
}

/// Surplus rate per policy of one class: theta [-(phi - 1) mu (S - V) - (nu_j - nu)(C - V)].
double class_surplus(const SubpopulationSpec& sub, double class_lapse, double valuation_lapse,
                     double mu, double sum, double v, double c) {
    return sub.sum_multiple *
           (-(sub.mortality_multiplier - 1.0) * mu * (sum - v) - (class_lapse - valuation_lapse) * (c - v));
}

}  // namespace

ClassBases class_bases(const ScenarioSpec& spec) {
    const double nu1 = resolve_normal_lapse(spec);
    const double nu2 = resolve_high_risk_lapse(spec, nu1);
    return {Basis(spec.delta, class_mortality(spec, spec.normal.mortality_multiplier),
                  LapseModel::constant(nu1)),
            Basis(spec.delta, class_mortality(spec, spec.high_risk.mortality_multiplier),
                  LapseModel::constant(nu2)),
            nu1, nu2};
}

CaseValuation value_case(CaseId id, const ScenarioSpec& spec) {
    spec.validate();
    const double term = spec.end_age - spec.entry_age;
    const double maturity = spec.maturity.value_or(spec.sum_insured);
    const Basis no_lapse(spec.delta, spec.mortality, LapseModel::zero());
    switch (id) {
        case CaseId::case1_c0:
        case CaseId::case1_cv: {
            const auto rule =
                id == CaseId::case1_cv ? SurrenderRule::proportion(1.0) : SurrenderRule::zero();
            Contract contract(spec.entry_age, term, spec.sum_insured, maturity, rule);
            auto policy = price_level(contract, no_lapse, spec.step);
            auto surrender = std::vector<double>(policy.value.size());
            for (std::size_t i = 0; i < surrender.size(); ++i) surrender[i] = rule.k() * policy.value[i];
            return {id, contract, no_lapse, std::move(policy), 0.0, std::move(surrender)};
        }
        case CaseId::case2: {
            Contract contract(spec.entry_age, term, spec.sum_insured, maturity);
            const Basis basis(spec.delta, spec.mortality, LapseModel::constant(spec.valuation_lapse));
            auto policy = price_level(contract, basis, spec.step);
            std::vector<double> surrender(policy.value.size(), 0.0);
            return {id, contract, basis, std::move(policy), spec.valuation_lapse,
                    std::move(surrender)};
        }
        case CaseId::case3: {
            Contract contract(spec.entry_age, term, spec.sum_insured, 0.0, SurrenderRule::zero(),
                              PremiumForm::mortality_cost);
            auto policy = current_cost_premium(contract, no_lapse, spec.step);
            std::vector<double> surrender(policy.value.size(), 0.0);
            return {id, contract, no_lapse, std::move(policy), 0.0, std::move(surrender)};
        }
    }
    throw ValidationError("unknown case");
}

double attrition(const ScenarioSpec& spec, double t) {
    const ClassBases bases = class_bases(spec);
    const double step = spec.step;
    return pi_from(spec.high_risk.initial_proportion,
                   in_force_probability(bases.normal, spec.entry_age, t, step),
                   in_force_probability(bases.high_risk, spec.entry_age, t, step));
}

LossRateCoefficients loss_rate_coefficients(CaseId id, const ScenarioSpec& spec, double pi) {
    const ClassBases bases = class_bases(spec);
    const double nu = id == CaseId::case2 ? spec.valuation_lapse : 0.0;
    const auto& n = spec.normal;
    const auto& hr = spec.high_risk;
    LossRateCoefficients out{};
    out.mortality_coefficient = -((1.0 - pi) * n.sum_multiple * (n.mortality_multiplier - 1.0) +
                                  pi * hr.sum_multiple * (hr.mortality_multiplier - 1.0));
    out.lapse_applies = has_lapse_surplus(id);
    out.lapse_coefficient = out.lapse_applies
                                ? (1.0 - pi) * n.sum_multiple * (bases.normal_lapse - nu) +
                                      pi * hr.sum_multiple * (bases.high_risk_lapse - nu)
                                : 0.0;
    return out;
}

LossRate loss_rate(const CaseValuation& valuation, const ScenarioSpec& spec, double pi, double t) {
    const ClassBases bases = class_bases(spec);
    const double age = valuation.contract.entry_age + t;
    const double mu = spec.mortality.hazard(age);
    const double v = valuation.policy.value_at(t);
    const double c = valuation.contract.surrender.k() * v;
    const double sum = valuation.contract.sum_insured;
    const double nu = valuation.valuation_lapse;
    const auto& n = spec.normal;
    const auto& hr = spec.high_risk;
    return {
        -((1.0 - pi) * n.sum_multiple * (n.mortality_multiplier - 1.0) +
          pi * hr.sum_multiple * (hr.mortality_multiplier - 1.0)) *
            mu * (sum - v),
        -((1.0 - pi) * n.sum_multiple * (bases.normal_lapse - nu) +
          pi * hr.sum_multiple * (bases.high_risk_lapse - nu)) *
            (c - v),
    };
}

ScenarioResult scenario_epv(const CaseValuation& valuation, const ScenarioSpec& spec) {
    const ClassBases bases = class_bases(spec);
    const auto discounts = class_discounts(valuation, bases);
    const DurationGrid& grid = valuation.policy.grid;
    const double x = valuation.contract.entry_age;
    const double sum = valuation.contract.sum_insured;
    const double pi0 = spec.high_risk.initial_proportion;
    const double nu = valuation.valuation_lapse;

    const auto normal_in_force = in_force_path(bases.normal, x, grid);
    const auto high_in_force = in_force_path(bases.high_risk, x, grid);

    ScenarioResult out{};
    out.case_id = valuation.case_id;
    out.premium = valuation.policy.premium.front();
    out.times = grid.times();
    out.pi_path.resize(grid.size());
    out.decomposition.resize(grid.size());

    std::vector<double> normal_term(grid.size()), high_term(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double mu = spec.mortality.hazard_unchecked(x + grid.time(i));
        const double v = valuation.policy.value[i];
        const double c = valuation.surrender[i];
        const double w1 = class_surplus(spec.normal, bases.normal_lapse, nu, mu, sum, v, c);
        const double w2 = class_surplus(spec.high_risk, bases.high_risk_lapse, nu, mu, sum, v, c);
        normal_term[i] = discounts.normal[i] * w1;
        high_term[i] = discounts.high_risk[i] * w2;

        const double pi = pi_from(pi0, normal_in_force[i], high_in_force[i]);
        out.pi_path[i] = pi;
        const auto& n = spec.normal;
        const auto& hr = spec.high_risk;
        out.decomposition[i] = {
            -((1.0 - pi) * n.sum_multiple * (n.mortality_multiplier - 1.0) +
              pi * hr.sum_multiple * (hr.mortality_multiplier - 1.0)) *
                mu * (sum - v),
            -((1.0 - pi) * n.sum_multiple * (bases.normal_lapse - nu) +
              pi * hr.sum_multiple * (bases.high_risk_lapse - nu)) *
                (c - v)};
    }
    const double h = grid.step();
    out.epv_loss = (1.0 - pi0) * trapezoid(normal_term, h) + pi0 * trapezoid(high_term, h);
    out.epv_premiums = premium_epv(valuation, spec, discounts);
    out.cost_pct = 100.0 * out.epv_loss / out.epv_premiums;
    return out;
}

ScenarioResult scenario_epv(const ScenarioSpec& spec) {
    return scenario_epv(value_case(spec.case_id, spec), spec);
}

ScenarioResult sensitivity_run(const ScenarioSpec& spec, double experience_lapse) {
    ScenarioSpec stressed = spec;
    stressed.normal.lapse = LapseBehavior::stressed(experience_lapse);
    return scenario_epv(stressed);
}

ScenarioMoments scenario_moments(const CaseValuation& valuation, const ScenarioSpec& spec) {
    const ClassBases bases = class_bases(spec);
    const double sum = valuation.contract.sum_insured;
    const Contract unit = valuation.contract.scaled(1.0 / sum);
    const RateFunction unit_premium = [rate = valuation.policy.premium_rate, sum](double t) {
        return rate(t) / sum;
    };
    const double step = valuation.policy.grid.step();
    ScenarioMoments out{
        {},
        unit_loss_moments(unit, valuation.premium_basis, unit_premium, bases.normal, 2, 1, step),
        unit_loss_moments(unit, valuation.premium_basis, unit_premium, bases.high_risk, 2, 2, step),
        premium_epv(valuation, spec, class_discounts(valuation, bases)),
        0.0};
    const double pi0 = spec.high_risk.initial_proportion;
    const MixtureClass classes[] = {
        {1.0 - pi0, spec.normal.sum_multiple * sum, out.normal},
        {pi0, spec.high_risk.sum_multiple * sum, out.high_risk},
    };
    out.mixture = mixture_variance(classes);
    out.sd_ratio = std::sqrt(std::max(out.mixture.variance, 0.0)) / out.epv_premiums;
    return out;
}

ScenarioMoments scenario_moments(const ScenarioSpec& spec) {
    return scenario_moments(value_case(spec.case_id, spec), spec);
}

std::vector<SweepRow> age_sweep(std::span<const CaseId> cases, const ScenarioSpec& base,
                                std::span<const double> entry_ages,
                                std::span<const double> valuation_lapses, ExperienceReading reading,
                                double fixed_experience_lapse) {
    constexpr LapseBehavior::Kind kModes[] = {LapseBehavior::Kind::uniform,
                                              LapseBehavior::Kind::differential};
    const std::size_t cells = entry_ages.size() * valuation_lapses.size();
    const std::size_t per_cell = cases.size() * 2;
    std::vector<SweepRow> rows(cells * per_cell);
    parallel_for(cells, [&](std::size_t cell) {
        ScenarioSpec spec = base;
        spec.entry_age = entry_ages[cell / valuation_lapses.size()];
        spec.valuation_lapse = valuation_lapses[cell % valuation_lapses.size()];
        spec.normal.lapse = reading == ExperienceReading::follows_valuation
                                ? LapseBehavior::uniform()
                                : LapseBehavior::stressed(fixed_experience_lapse);
        std::size_t slot = cell * per_cell;
        for (CaseId id : cases) {
            const CaseValuation valuation = value_case(id, spec);
            for (auto mode : kModes) {
                spec.high_risk.lapse = mode == LapseBehavior::Kind::uniform
                                           ? LapseBehavior::uniform()
                                           : LapseBehavior::differential();
                rows[slot++] = {spec.entry_age, id, mode, spec.valuation_lapse,
                                scenario_epv(valuation, spec).cost_pct};
            }
        }
    });
    return rows;
}

}  // namespace lapse
