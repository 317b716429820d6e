#include "lapse/contracts.hpp"

#include <cmath>

#include "lapse/errors.hpp"
#include "lapse/hazards.hpp"

namespace lapse {

SurrenderRule SurrenderRule::proportion(double k) {
    if (!(k >= 0.0 && k <= 1.0)) {
        throw ValidationError("surrender rule: proportion k must lie in [0, 1]");
    }
    SurrenderRule rule;
    rule.kind_ = Kind::proportion_of_value;
    rule.k_ = k;
    return rule;
}

Contract::Contract(double entry_age_, double term_, double sum_insured_, double maturity_,
                   SurrenderRule surrender_, PremiumForm premium_form_)
    : entry_age(entry_age_),
      term(term_),
      sum_insured(sum_insured_),
      maturity(maturity_),
      surrender(surrender_),
      premium_form(premium_form_) {
    if (!(term > 0.0) || !std::isfinite(term)) throw ValidationError("contract: term must be > 0");
    if (!(entry_age >= 0.0) || entry_age + term > kMaxAge) {
        throw ValidationError("contract: cover must lie within ages [0, 120]");
    }
    if (!(sum_insured >= 0.0) || !std::isfinite(sum_insured)) {
        throw ValidationError("contract: sum insured must be >= 0");
    }
    if (!(maturity >= 0.0) || !std::isfinite(maturity)) {
        throw ValidationError("contract: maturity value must be >= 0");
    }
    if (premium_form == PremiumForm::mortality_cost) {
        if (surrender.kind() != SurrenderRule::Kind::zero) {
            throw ValidationError("contract: mortality-cost premiums require zero surrender values");
        }
        if (maturity != 0.0) {
            throw ValidationError("contract: mortality-cost premiums require zero maturity value");
        }
    }
}

Contract Contract::scaled(double factor) const {
    return Contract(entry_age, term, sum_insured * factor, maturity * factor, surrender,
                    premium_form);
}

Contract Contract::with_surrender(SurrenderRule rule) const {
    return Contract(entry_age, term, sum_insured, maturity, rule, premium_form);
}

Contract term_to_100(double entry_age, double sum_insured, SurrenderRule surrender) {
    return Contract(entry_age, 100.0 - entry_age, sum_insured, sum_insured, surrender);
}

double surrender_value(const SurrenderRule& rule, double t, double policy_value) {
    if (!(t >= 0.0)) throw DomainError("surrender value: duration must be >= 0");
    if (!(policy_value >= 0.0)) throw DomainError("surrender value: policy value must be >= 0");
    return rule.k() * policy_value;
}

std::string_view to_string(PremiumForm form) noexcept {
    return form == PremiumForm::level ? "level" : "mortality_cost";
}

}  // namespace lapse
