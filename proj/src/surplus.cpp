#include "lapse/surplus.hpp"

#include "lapse/errors.hpp"

namespace lapse {

namespace {

void require_aligned(const DurationGrid& grid, std::size_t size, const char* what) {
    if (size != grid.size()) {
        throw ValidationError(std::string("surplus: ") + what + " is not aligned with the grid");
    }
}

double weighted_epv(std::span<const double> discount, std::span<const double> rate, double step) {
    std::vector<double> product(rate.size());
    for (std::size_t i = 0; i < rate.size(); ++i) product[i] = discount[i] * rate[i];
    return trapezoid(product, step);
}

}  // namespace

std::vector<double> surrender_path(const SurrenderRule& rule, const PolicyFunctions& valuation) {
    std::vector<double> out(valuation.value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rule.k() * valuation.value[i];
    return out;
}

SurplusPath surplus_rate(const Contract& contract, const PolicyFunctions& valuation,
                         const Basis& valuation_basis, const Basis& experience_basis,
                         std::span<const double> surrender_values,
                         std::span<const double> charged_premium) {
    const DurationGrid& grid = valuation.grid;
    if (grid.term() != contract.term) {
        throw ValidationError("surplus: valuation term differs from the contract term");
    }
    require_aligned(grid, valuation.value.size(), "valuation");
    require_aligned(grid, surrender_values.size(), "surrender value path");
    if (!charged_premium.empty()) require_aligned(grid, charged_premium.size(), "charged premium");

    const double x = contract.entry_age;
    const double sum = contract.sum_insured;
    const double interest_gap = experience_basis.delta - valuation_basis.delta;
    SurplusPath out{grid, std::vector<double>(grid.size()), 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double age = x + grid.time(i);
        const double v = valuation.value[i];
        const double mu_gap = experience_basis.mortality.hazard_unchecked(age) -
                              valuation_basis.mortality.hazard_unchecked(age);
        const double nu_gap = experience_basis.lapse.rate(age) - valuation_basis.lapse.rate(age);
        double w = interest_gap * v - mu_gap * (sum - v) - nu_gap * (surrender_values[i] - v);
        if (!charged_premium.empty()) w += charged_premium[i] - valuation.premium[i];
        out.rate[i] = w;
    }
    const auto discount = survivorship_path(experience_basis, x, grid);
    out.epv = weighted_epv(discount, out.rate, grid.step());
    return out;
}

SurplusPath surplus_rate(const Contract& contract, const PolicyFunctions& valuation,
                         const Basis& valuation_basis, const Basis& experience_basis,
                         const SurrenderRule& surrender) {
    const auto c = surrender_path(surrender, valuation);
    return surplus_rate(contract, valuation, valuation_basis, experience_basis, c);
}

PremiumReductionCheck verify_premium_reduction_identity(const Contract& contract,
                                                        const PolicyFunctions& pricing_no_lapse,
                                                        const PolicyFunctions& pricing_lapse,
                                                        const Basis& premium_basis,
                                                        const Basis& experience_basis) {
    const DurationGrid& grid = pricing_lapse.grid;
    if (!(pricing_no_lapse.grid == grid)) {
        throw ValidationError("premium reduction: pricing grids differ");
    }
    const double x = contract.entry_age;
    const auto discount = survivorship_path(experience_basis, x, grid);
    const auto c = surrender_path(contract.surrender, pricing_lapse);

    const std::size_t size = grid.size();
    std::vector<double> reduction(size), released(size), cash(size), simplified(size);
    bool same_lapses = true;
    for (std::size_t i = 0; i < size; ++i) {
        const double age = x + grid.time(i);
        const double nu_exp = experience_basis.lapse.rate(age);
        const double nu = premium_basis.lapse.rate(age);
        same_lapses = same_lapses && nu_exp == nu;
        const double v = pricing_no_lapse.value[i];
        const double v_star = pricing_lapse.value[i];
        reduction[i] = pricing_no_lapse.premium[i] - pricing_lapse.premium[i];
        released[i] = nu_exp * (v - v_star);
        cash[i] = nu * (v_star - c[i]);
        simplified[i] = nu * (v - c[i]);
    }
    const double h = grid.step();
    PremiumReductionCheck out{};
    out.premium_reduction_epv = weighted_epv(discount, reduction, h);
    out.value_release_epv = weighted_epv(discount, released, h);
    out.lapse_cash_epv = weighted_epv(discount, cash, h);
    out.residual = out.premium_reduction_epv - out.value_release_epv - out.lapse_cash_epv;
    if (same_lapses) {
        out.simplified_residual = out.premium_reduction_epv - weighted_epv(discount, simplified, h);
    }
    return out;
}

double premium_reduction_residual(const Contract& contract, const PolicyFunctions& pricing_no_lapse,
                                  const PolicyFunctions& pricing_lapse, const Basis& premium_basis,
                                  std::span<const double> discount) {
    const DurationGrid& grid = pricing_lapse.grid;
    require_aligned(grid, discount.size(), "discount path");
    const auto c = surrender_path(contract.surrender, pricing_lapse);
    std::vector<double> reduction(grid.size()), lapse_profit(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double nu = premium_basis.lapse.rate(contract.entry_age + grid.time(i));
        reduction[i] = pricing_no_lapse.premium[i] - pricing_lapse.premium[i];
        lapse_profit[i] = nu * (pricing_no_lapse.value[i] - c[i]);
    }
    return weighted_epv(discount, reduction, grid.step()) -
           weighted_epv(discount, lapse_profit, grid.step());
}

ValuationInvariance verify_valuation_invariance(const Contract& contract,
                                                const Basis& premium_basis,
                                                const LapseModel& experience_lapse,
                                                double step) {
    const Basis no_lapse = premium_basis.with_lapse(LapseModel::zero());
    const Basis experience = premium_basis.with_lapse(experience_lapse);
    const PolicyFunctions full = price_level(contract, no_lapse, step);
    const PolicyFunctions net = price_level(contract, premium_basis, step);
    const auto c = surrender_path(contract.surrender, net);

    // Contract premium is P in both valuations; only the policy values differ.
    const auto w = surplus_rate(contract, full, no_lapse, experience, c);
    const auto w_star = surplus_rate(contract, net, premium_basis, experience, c, full.premium);
    return {w.epv, w_star.epv};
}

ProfitLoss max_profit_loss(const Contract& contract, const Basis& lapse_supported_basis,
                           double step) {
    if (contract.surrender.k() == 1.0) return {0.0, 0.0};
    const double x = contract.entry_age;
    const Basis no_lapse = lapse_supported_basis.with_lapse(LapseModel::zero());
    const PolicyFunctions full = price_level(contract, no_lapse, step);
    const PolicyFunctions supported = price_level(contract, lapse_supported_basis, step);
    const DurationGrid& grid = full.grid;
    const std::vector<double> nothing(grid.size(), 0.0);

    // Profit: P charged, lapses occur at the premium-basis rate, C = 0.
    const auto profit = surplus_rate(contract, full, no_lapse, lapse_supported_basis, nothing);
    const auto with_lapses = survivorship_path(lapse_supported_basis, x, grid);
    const double profit_pct = 100.0 * profit.epv / weighted_epv(with_lapses, full.premium, grid.step());

    // Loss: P* charged, no lapses occur; each absent lapse forgoes V*.
    const auto loss = surplus_rate(contract, supported, lapse_supported_basis, no_lapse, nothing);
    const auto without_lapses = survivorship_path(no_lapse, x, grid);
    const double loss_pct =
        100.0 * loss.epv / weighted_epv(without_lapses, supported.premium, grid.step());
    return {profit_pct, loss_pct};
}

}  // namespace lapse
