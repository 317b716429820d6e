#include "lapse/thiele.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lapse/errors.hpp"

namespace lapse {

RateFunction level_rate(double premium) {
    return [premium](double) { return premium; };
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::level_no_lapse_support: return "level_no_lapse_support";
        case Regime::level_lapse_supported: return "level_lapse_supported";
        case Regime::current_cost: return "current_cost";
    }
    return "unknown";
}

double PolicyFunctions::value_at(double t) const {
    if (t <= 0.0) return value.front();
    if (t >= grid.term()) return value.back();
    const double pos = t / grid.step();
    const auto i = std::min(static_cast<std::size_t>(pos), grid.intervals() - 1);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * value[i] + w * value[i + 1];
}

PolicyFunctions solve_policy_value(const Contract& contract, const Basis& basis,
                                   const RateFunction& premium, double step) {
    const DurationGrid grid(contract.term, step);
    const double h = grid.step();
    const double x = contract.entry_age;
    const double sum = contract.sum_insured;
    const double retained = 1.0 - contract.surrender.k();

    auto slope = [&](double t, double v) {
        const double age = x + t;
        const double mu = basis.mortality.hazard_unchecked(age);
        const double nu = basis.lapse.rate(age);
        return (basis.delta + retained * nu) * v + premium(t) - mu * (sum - v);
    };

    PolicyFunctions out{grid, premium, std::vector<double>(grid.size()),
                        std::vector<double>(grid.size()),
                        basis.lapse.constant_rate() == 0.0 ? Regime::level_no_lapse_support
                                                           : Regime::level_lapse_supported};
    const std::size_t n = grid.intervals();
    out.value[n] = contract.maturity;
    for (std::size_t i = n; i > 0; --i) {
        const double t = grid.time(i);
        const double v = out.value[i];
        const double k1 = slope(t, v);
        const double k2 = slope(t - 0.5 * h, v - 0.5 * h * k1);
        const double k3 = slope(t - 0.5 * h, v - 0.5 * h * k2);
        const double k4 = slope(t - h, v - h * k3);
        const double next = v - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next)) {
            throw NumericalError("thiele: non-finite policy value at duration " +
                                 std::to_string(grid.time(i - 1)));
        }
        out.value[i - 1] = next;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) out.premium[i] = premium(grid.time(i));
    return out;
}

double solve_level_premium(const Contract& contract, const Basis& basis, double step) {
    if (contract.premium_form != PremiumForm::level) {
        throw ValidationError("level premium: contract premium form is not level");
    }
    const double v0 = solve_policy_value(contract, basis, level_rate(0.0), step).value.front();
    const double v1 = solve_policy_value(contract, basis, level_rate(1.0), step).value.front();
    const double slope = v1 - v0;
    if (slope == 0.0 || !std::isfinite(slope)) {
        throw NumericalError("level premium: zero premium-paying exposure");
    }
    const double premium = -v0 / slope;
    const double check = solve_policy_value(contract, basis, level_rate(premium), step).value.front();
    const double scale = std::max({contract.sum_insured, contract.maturity, 1.0});
    if (std::abs(check) > 1e-6 * scale) {
        throw NumericalError("level premium: equivalence check failed, V(0) = " +
                             std::to_string(check));
    }
    return premium;
}

PolicyFunctions price_level(const Contract& contract, const Basis& basis, double step) {
    return solve_policy_value(contract, basis, level_rate(solve_level_premium(contract, basis, step)),
                              step);
}

PolicyFunctions current_cost_premium(const Contract& contract, const Basis& basis, double step) {
    if (contract.surrender.kind() != SurrenderRule::Kind::zero) {
        throw ValidationError("current-cost premium: surrender values must be zero");
    }
    if (contract.maturity != 0.0) {
        throw ValidationError("current-cost premium: maturity value must be zero");
    }
    const DurationGrid grid(contract.term, step);
    const double x = contract.entry_age;
    const double sum = contract.sum_insured;
    const MortalityModel mortality = basis.mortality;
    RateFunction rate = [mortality, x, sum](double t) {
        return mortality.hazard_unchecked(x + t) * sum;
    };
    PolicyFunctions out{grid, rate, std::vector<double>(grid.size()),
                        std::vector<double>(grid.size(), 0.0), Regime::current_cost};
    for (std::size_t i = 0; i < grid.size(); ++i) out.premium[i] = rate(grid.time(i));
    return out;
}

Basis lidstone_equivalent_basis(const Basis& basis, double k) {
    if (!(k >= 0.0 && k <= 1.0)) throw ValidationError("lidstone: k must lie in [0, 1]");
    const auto nu = basis.lapse.constant_rate();
    if (!nu) throw UnsupportedError("lidstone: lapse model is not constant");
    return Basis(basis.delta + (1.0 - k) * *nu, basis.mortality, LapseModel::zero());
}

}  // namespace lapse
