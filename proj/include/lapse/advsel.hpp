#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lapse/contracts.hpp"
#include "lapse/hazards.hpp"
#include "lapse/moments.hpp"
#include "lapse/thiele.hpp"

namespace lapse {

/// How lapse surplus is handled by the product.
enum class CaseId {
    case1_c0,  ///< level premium, no lapse support, no surrender value
    case1_cv,  ///< level premium, no lapse support, surrender value = V(t)
    case2,     ///< level premium with lapse support, no surrender value
    case3,     ///< premium equal to the mortality cost
};

inline constexpr CaseId kAllCases[] = {CaseId::case1_c0, CaseId::case1_cv, CaseId::case2,
                                       CaseId::case3};

std::string_view to_string(CaseId id) noexcept;
std::optional<CaseId> parse_case_id(std::string_view text) noexcept;

/// Lapse behavior of a subpopulation relative to the valuation lapse rate.
///  - uniform: the normal class lapses at the valuation rate; the high-risk
///    class lapses like the normal class;
///  - differential: the high-risk class never lapses;
///  - stressed: an explicit experienced rate.
struct LapseBehavior {
    enum class Kind { uniform, differential, stressed };
    Kind kind = Kind::uniform;
    double rate = 0.0;

    static LapseBehavior uniform() noexcept { return {Kind::uniform, 0.0}; }
    static LapseBehavior differential() noexcept { return {Kind::differential, 0.0}; }
    static LapseBehavior stressed(double rate);
};

struct SubpopulationSpec {
    int id = 1;  ///< 1 = normal, 2 = high risk
    double mortality_multiplier = 1.0;
    LapseBehavior lapse = LapseBehavior::uniform();
    double sum_multiple = 1.0;
    double initial_proportion = 0.0;  ///< used for the high-risk class only
};

/// One adverse-selection scenario: a 'Term to 100' style contract, a premium
/// and valuation basis, and two subpopulations charged the same premium.
struct ScenarioSpec {
    CaseId case_id = CaseId::case2;
    double entry_age = 35.0;
    double end_age = 100.0;
    double sum_insured = 1.0;
    std::optional<double> maturity;  ///< defaults to the sum insured
    double delta = 0.05;
    MortalityModel mortality = MortalityModel::gm82_males();
    double valuation_lapse = 0.06;
    SubpopulationSpec normal{1, 1.0, LapseBehavior::uniform(), 1.0, 0.0};
    SubpopulationSpec high_risk{2, 5.0, LapseBehavior::differential(), 10.0, 0.001};
    double step = kDefaultStep;

    /// Throws ValidationError on negative rates, a bad age range or
    /// proportions outside [0, 1].
    void validate() const;
};

/// Experienced hazards of the two subpopulations.
struct ClassBases {
    Basis normal;
    Basis high_risk;
    double normal_lapse;
    double high_risk_lapse;
};

ClassBases class_bases(const ScenarioSpec& spec);

/// Pricing and valuation of the product under one case: the contract actually
/// sold, the premium basis, the policy functions and the surrender values.
struct CaseValuation {
    CaseId case_id;
    Contract contract;
    Basis premium_basis;
    PolicyFunctions policy;
    double valuation_lapse;       ///< 0 unless lapse supported
    std::vector<double> surrender;  ///< C(t) on the policy grid
};

CaseValuation value_case(CaseId id, const ScenarioSpec& spec);

/// pi(t): expected share of the in-force portfolio in the high-risk class.
double attrition(const ScenarioSpec& spec, double t);

/// Coefficients of the per-policy loss rate at a time where the high-risk
/// share is pi:
///   mortality = mortality_coefficient * mu1 * (S - V)
///   lapse     = lapse_coefficient * (V - C)
/// with V the case's policy value (zero in case 3).
struct LossRateCoefficients {
    double mortality_coefficient;
    double lapse_coefficient;
    bool lapse_applies;  ///< false where C = V or V = 0, i.e. no lapse surplus
};

LossRateCoefficients loss_rate_coefficients(CaseId id, const ScenarioSpec& spec, double pi);

struct LossRate {
    double mortality;
    double lapse;
};

/// Surplus rate per in-force policy at duration t, split into mortality and
/// lapse components. Negative values are losses.
LossRate loss_rate(const CaseValuation& valuation, const ScenarioSpec& spec, double pi, double t);

struct ScenarioResult {
    CaseId case_id;
    double premium;       ///< normal-class premium rate at issue
    double epv_premiums;  ///< both classes, high-risk paying theta x premium
    double epv_loss;      ///< EPV of total surplus; negative for a loss
    double cost_pct;      ///< 100 * epv_loss / epv_premiums
    std::vector<double> times;
    std::vector<double> pi_path;
    std::vector<LossRate> decomposition;
};

/// EPV of surplus from both subpopulations, each discounted with its own
/// survivorship, and the adverse-selection cost measure.
ScenarioResult scenario_epv(const ScenarioSpec& spec);
ScenarioResult scenario_epv(const CaseValuation& valuation, const ScenarioSpec& spec);

/// scenario_epv with the normal class experiencing `experience_lapse`.
ScenarioResult sensitivity_run(const ScenarioSpec& spec, double experience_lapse);

struct ScenarioMoments {
    MixtureMoments mixture;
    LossMoments normal;     ///< per unit sum insured
    LossMoments high_risk;  ///< per unit sum insured
    double epv_premiums;
    double sd_ratio;  ///< sd of loss / EPV[premiums]
};

ScenarioMoments scenario_moments(const ScenarioSpec& spec);
ScenarioMoments scenario_moments(const CaseValuation& valuation, const ScenarioSpec& spec);

/// Whether non-baseline valuation lapse rates also move the normal class's
/// experienced lapse rate.
enum class ExperienceReading { follows_valuation, fixed };

struct SweepRow {
    double entry_age;
    CaseId case_id;
    LapseBehavior::Kind mode;  ///< uniform or differential
    double valuation_lapse;
    double cost_pct;
};

/// Cost for every (age, case, lapsing mode, valuation lapse) combination,
/// with cover always ending at spec.end_age. Rows are ordered by age, then
/// valuation lapse, case and mode.
std::vector<SweepRow> age_sweep(std::span<const CaseId> cases, const ScenarioSpec& base,
                                std::span<const double> entry_ages,
                                std::span<const double> valuation_lapses,
                                ExperienceReading reading = ExperienceReading::follows_valuation,
                                double fixed_experience_lapse = 0.06);

}  // namespace lapse
