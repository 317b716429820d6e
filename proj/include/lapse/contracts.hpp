#pragma once

#include <string_view>

namespace lapse {

/// Cash paid on lapse, as a function of the policy value in force.
class SurrenderRule {
public:
    enum class Kind { zero, proportion_of_value };

    static SurrenderRule zero() noexcept { return SurrenderRule{}; }
    /// C(t) = k V(t); throws ValidationError unless 0 <= k <= 1.
    static SurrenderRule proportion(double k);

    Kind kind() const noexcept { return kind_; }
    /// Proportion of the policy value paid; 0 for the zero rule.
    double k() const noexcept { return k_; }

    friend bool operator==(const SurrenderRule&, const SurrenderRule&) = default;

private:
    SurrenderRule() = default;
    Kind kind_ = Kind::zero;
    double k_ = 0.0;
};

enum class PremiumForm { level, mortality_cost };

/// An endowment-type contract with constant sum insured: 'Term to 100' when
/// entry_age + term = 100 and maturity = sum_insured.
struct Contract {
    double entry_age;
    double term;
    double sum_insured;
    double maturity;
    SurrenderRule surrender;
    PremiumForm premium_form;

    /// Validates: term > 0, amounts >= 0, cover ends by age 120, and a
    /// mortality-cost premium carries neither surrender nor maturity value
    /// (its policy value is identically zero).
    Contract(double entry_age, double term, double sum_insured, double maturity,
             SurrenderRule surrender = SurrenderRule::zero(),
             PremiumForm premium_form = PremiumForm::level);

    double end_age() const noexcept { return entry_age + term; }

    /// A copy with every currency amount multiplied by `factor`.
    Contract scaled(double factor) const;
    Contract with_surrender(SurrenderRule rule) const;
};

/// 'Term to 100' endowment: cover to age 100, maturity value equal to the sum insured.
Contract term_to_100(double entry_age, double sum_insured,
                     SurrenderRule surrender = SurrenderRule::zero());

/// Surrender value payable at duration t on a policy with value `policy_value`.
double surrender_value(const SurrenderRule& rule, double t, double policy_value);

std::string_view to_string(PremiumForm form) noexcept;

}  // namespace lapse
