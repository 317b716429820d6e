#include <doctest.h>

#include <cmath>

#include "lapse/errors.hpp"
#include "lapse/surplus.hpp"
#include "support.hpp"

using namespace lapse;

namespace {

const MortalityModel kGm82 = MortalityModel::gm82_males();
constexpr double kSum = 250000.0;

Basis basis(double delta, double nu) {
    return Basis(delta, kGm82, nu > 0.0 ? LapseModel::constant(nu) : LapseModel::zero());
}

struct Priced {
    Contract contract;
    Basis premium_basis;
    PolicyFunctions no_lapse;
    PolicyFunctions lapse;
};

Priced price(double delta, double nu, double k) {
    const Contract c = term_to_100(35.0, kSum, SurrenderRule::proportion(k));
    const Basis b = basis(delta, nu);
    return {c, b, price_level(c, basis(delta, 0.0)), price_level(c, b)};
}

}  // namespace

TEST_CASE("lapse surplus examples") {
    const Contract c(35.0, 10.0, 0.0, 100.0);
    const Basis valuation(0.0, MortalityModel::none(), LapseModel::zero());
    const Basis experience(0.0, MortalityModel::none(), LapseModel::constant(0.06));
    const auto pf = solve_policy_value(c, valuation, level_rate(0.0));

    const auto paid_nothing = surplus_rate(c, pf, valuation, experience, SurrenderRule::zero());
    for (double w : paid_nothing.rate) REQUIRE(w == doctest::Approx(6.0).epsilon(1e-12));

    const auto full = surplus_rate(c, pf, valuation, experience, SurrenderRule::proportion(1.0));
    for (double w : full.rate) REQUIRE(w == 0.0);
}

TEST_CASE("no surplus when experience follows the valuation basis") {
    const Priced p = price(0.05, 0.06, 0.3);
    const auto w = surplus_rate(p.contract, p.lapse, p.premium_basis, p.premium_basis,
                                p.contract.surrender);
    for (double r : w.rate) REQUIRE(r == 0.0);
    CHECK(w.epv == 0.0);
}

TEST_CASE("surplus EPV is the trapezoid of discounted rates") {
    const Priced p = price(0.03, 0.06, 0.0);
    const Basis experience = basis(0.03, 0.045);
    const auto w = surplus_rate(p.contract, p.no_lapse, basis(0.03, 0.0), experience,
                                SurrenderRule::zero());
    const auto discount = survivorship_path(experience, 35.0, w.grid);
    std::vector<double> product(discount.size());
    for (std::size_t i = 0; i < product.size(); ++i) product[i] = discount[i] * w.rate[i];
    CHECK(w.epv == trapezoid(product, w.grid.step()));
}

TEST_CASE("misaligned paths are rejected") {
    const Priced p = price(0.03, 0.06, 0.0);
    const std::vector<double> short_path(10, 0.0);
    CHECK_THROWS_AS((void)surplus_rate(p.contract, p.no_lapse, basis(0.03, 0), p.premium_basis, short_path),
                    ValidationError);
    const auto coarse = price_level(p.contract, p.premium_basis, 0.1);
    CHECK_THROWS_AS((void)verify_premium_reduction_identity(p.contract, p.no_lapse, coarse,
                                                            p.premium_basis, p.premium_basis),
                    ValidationError);
}

TEST_CASE("premium reduction identity on the reference basis") {
    const Priced p = price(0.03, 0.06, 0.0);
    const auto same = verify_premium_reduction_identity(p.contract, p.no_lapse, p.lapse,
                                                        p.premium_basis, p.premium_basis);
    CHECK(std::abs(same.residual) <= 1e-6 * kSum);
    REQUIRE(same.simplified_residual.has_value());
    CHECK(std::abs(*same.simplified_residual) <= 1e-6 * kSum);
    CHECK(same.premium_reduction_epv > 0.0);

    const auto none = verify_premium_reduction_identity(p.contract, p.no_lapse, p.lapse,
                                                        p.premium_basis, basis(0.03, 0.0));
    CHECK(std::abs(none.residual) <= 1e-6 * kSum);
    CHECK(none.value_release_epv == 0.0);
    CHECK_FALSE(none.simplified_residual.has_value());
}

TEST_CASE("identity with the premium-basis discount function") {
    for (double k : {0.0, 0.5, 1.0}) {
        const Priced p = price(0.03, 0.06, k);
        const auto discount = survivorship_path(p.premium_basis, 35.0, p.lapse.grid);
        CHECK(std::abs(premium_reduction_residual(p.contract, p.no_lapse, p.lapse, p.premium_basis,
                                                  discount)) <= 1e-6 * kSum);
    }
}

TEST_CASE("premium reduction identity over the full sweep") {
    int cells = 0;
    for (double delta : {0.03, 0.06, 0.09}) {
        for (double nu : {0.03, 0.06}) {
            for (double k : {0.0, 0.5, 1.0}) {
                const Priced p = price(delta, nu, k);
                for (double nu_exp : {0.0, 0.03, 0.06, 0.09}) {
                    const auto check = verify_premium_reduction_identity(
                        p.contract, p.no_lapse, p.lapse, p.premium_basis, basis(delta, nu_exp));
                    REQUIRE(std::abs(check.residual) <= 1e-6 * kSum);
                    if (check.simplified_residual) {
                        REQUIRE(std::abs(*check.simplified_residual) <= 1e-6 * kSum);
                    }
                    const auto inv = verify_valuation_invariance(p.contract, p.premium_basis,
                                                                 LapseModel::constant(nu_exp));
                    REQUIRE(std::abs(inv.epv_premium_basis - inv.epv_net_premium) <= 1e-6 * kSum);
                    ++cells;
                }
            }
        }
    }
    CHECK(cells == 72);
}

TEST_CASE("valuation invariance examples") {
    const Priced p = price(0.03, 0.06, 0.0);
    for (double nu_exp : {0.0, 0.03, 0.05, 0.06, 0.09}) {
        const auto inv = verify_valuation_invariance(p.contract, p.premium_basis,
                                                     nu_exp > 0 ? LapseModel::constant(nu_exp)
                                                                : LapseModel::zero());
        CHECK(std::abs(inv.epv_premium_basis - inv.epv_net_premium) <= 1e-6 * kSum);
        if (nu_exp == 0.0) CHECK(inv.epv_premium_basis == 0.0);
    }
    // With experienced lapses equal to the premium basis both equal the EPV
    // of nu (V - C).
    const auto inv = verify_valuation_invariance(p.contract, p.premium_basis, LapseModel::constant(0.06));
    const auto discount = survivorship_path(p.premium_basis, 35.0, p.no_lapse.grid);
    std::vector<double> lapse_profit(discount.size());
    for (std::size_t i = 0; i < discount.size(); ++i) lapse_profit[i] = discount[i] * 0.06 * p.no_lapse.value[i];
    CHECK(inv.epv_premium_basis == doctest::Approx(trapezoid(lapse_profit, p.no_lapse.grid.step())).epsilon(1e-12));
}

TEST_CASE("maximum profit and loss") {
    const auto row1 = max_profit_loss(term_to_100(35.0, kSum, SurrenderRule::proportion(0.5)), basis(0.03, 0.03));
    CHECK(std::abs(row1.max_profit_pct - 38.00) <= 0.1);
    CHECK(std::abs(row1.max_loss_pct + 56.52) <= 0.1);

    const auto row8 = max_profit_loss(term_to_100(35.0, kSum), basis(0.03, 0.06));
    CHECK(std::abs(row8.max_profit_pct - 57.64) <= 0.1);
    CHECK(std::abs(row8.max_loss_pct + 136.09) <= 0.1);

    const auto full = max_profit_loss(term_to_100(35.0, kSum, SurrenderRule::proportion(1.0)), basis(0.03, 0.06));
    CHECK(full.max_profit_pct == 0.0);
    CHECK(full.max_loss_pct == 0.0);
}

TEST_CASE("maximum loss grows with the premium-basis lapse rate") {
    for (double delta : {0.03, 0.06, 0.09}) {
        for (double k : {0.0, 0.5}) {
            const Contract c = term_to_100(35.0, kSum, SurrenderRule::proportion(k));
            const double low = max_profit_loss(c, basis(delta, 0.03)).max_loss_pct;
            const double high = max_profit_loss(c, basis(delta, 0.06)).max_loss_pct;
            CHECK(std::abs(high) > std::abs(low));
        }
    }
}

TEST_CASE("property: lapse surplus without lapse support is never negative") {
    testing::Gen gen(41);
    for (int n = 0; n < testing::kPropertyCases; ++n) {
        const double x = gen.uniform(20.0, 70.0);
        const double delta = gen.uniform(0.0, 0.1);
        const auto rule = SurrenderRule::proportion(gen.uniform(0.0, 1.0));
        const Contract c(x, 100.0 - x, 1000.0, 1000.0, rule);
        const Basis valuation = basis(delta, 0.0);
        const auto pf = price_level(c, valuation, 0.05);
        const auto w = surplus_rate(c, pf, valuation, basis(delta, gen.uniform(1e-4, 0.2)), rule);
        for (double r : w.rate) REQUIRE(r >= -1e-9);
    }
}
