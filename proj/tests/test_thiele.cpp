#include <doctest.h>

#include <cmath>
#include <limits>

#include "lapse/errors.hpp"
#include "lapse/thiele.hpp"
#include "support.hpp"

using namespace lapse;

namespace {

const MortalityModel kGm82 = MortalityModel::gm82_males();

Basis table1_basis(double delta, double nu) {
    return Basis(delta, kGm82, nu > 0.0 ? LapseModel::constant(nu) : LapseModel::zero());
}

Contract pure_maturity() { return Contract(35.0, 10.0, 0.0, 100.0); }

}  // namespace

TEST_CASE("pure maturity values") {
    const Basis flat(0.0, MortalityModel::none(), LapseModel::zero());
    const auto pf = solve_policy_value(pure_maturity(), flat, level_rate(0.0));
    for (double v : pf.value) CHECK(v == doctest::Approx(100.0).epsilon(1e-14));

    const Basis five(0.05, MortalityModel::none(), LapseModel::zero());
    const auto discounted = solve_policy_value(pure_maturity(), five, level_rate(0.0));
    CHECK(discounted.value.front() == doctest::Approx(60.6531).epsilon(1e-6));
    CHECK(discounted.value.front() == doctest::Approx(100.0 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(discounted.value.back() == 100.0);
}

TEST_CASE("level premium examples") {
    const Contract c = term_to_100(35.0, 250000.0);
    CHECK(solve_level_premium(c, table1_basis(0.03, 0.0)) == doctest::Approx(3744.44).epsilon(0.002));
    CHECK(solve_level_premium(c, table1_basis(0.03, 0.06)) == doctest::Approx(1586.02).epsilon(0.002));

    const Basis flat(0.0, MortalityModel::none(), LapseModel::zero());
    for (double sum : {0.0, 1.0, 1e6}) {
        CHECK(solve_level_premium(Contract(35.0, 10.0, sum, 100.0), flat) ==
              doctest::Approx(10.0).epsilon(1e-12));
    }
}

// Known miss: our premium is 3744.4746, so the printed 3744.44 leaves
// V(0) near 0.77. Kept visible rather than loosened.
TEST_CASE("printed premium gives a value at issue close to zero" * doctest::may_fail()) {
    const Contract c = term_to_100(35.0, 250000.0);
    const auto pf = solve_policy_value(c, table1_basis(0.03, 0.0), level_rate(3744.44));
    CHECK(std::abs(pf.value.front()) <= 0.5);
}

TEST_CASE("policy function boundary conditions") {
    const Contract c = term_to_100(35.0, 250000.0);
    for (double nu : {0.0, 0.06}) {
        const auto pf = price_level(c, table1_basis(0.05, nu));
        CHECK(pf.value.back() == c.maturity);
        CHECK(std::abs(pf.value.front()) <= 1e-6 * c.sum_insured);
        CHECK(pf.regime == (nu > 0 ? Regime::level_lapse_supported : Regime::level_no_lapse_support));
    }
}

TEST_CASE("level premium requires the level form") {
    const Contract cc(35.0, 65.0, 1.0, 0.0, SurrenderRule::zero(), PremiumForm::mortality_cost);
    CHECK_THROWS_AS((void)solve_level_premium(cc, table1_basis(0.03, 0.0)), ValidationError);
}

TEST_CASE("non-finite values are reported with the duration") {
    const Contract c = term_to_100(35.0, 1.0);
    const RateFunction bad = [](double t) {
        return t < 30.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    };
    try {
        (void)solve_policy_value(c, table1_basis(0.03, 0.0), bad);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("duration") != std::string::npos);
    }
}

TEST_CASE("current cost premium") {
    const Contract c(35.0, 65.0, 250000.0, 0.0, SurrenderRule::zero(), PremiumForm::mortality_cost);
    const Basis basis = table1_basis(0.05, 0.0);
    const auto pf = current_cost_premium(c, basis);
    CHECK(pf.premium.front() == mortality_hazard(kGm82, 35.0) * 250000.0);
    for (double v : pf.value) REQUIRE(v == 0.0);
    CHECK(pf.regime == Regime::current_cost);

    const Basis heavy(0.05, MortalityModel::scaled(kGm82, 5.0), LapseModel::zero());
    const auto pf5 = current_cost_premium(c, heavy);
    for (std::size_t i = 0; i < pf.premium.size(); i += 97) {
        REQUIRE(pf5.premium[i] == doctest::Approx(5.0 * pf.premium[i]).epsilon(1e-15));
    }

    const Contract with_sv = term_to_100(35.0, 250000.0, SurrenderRule::proportion(0.5));
    CHECK_THROWS_AS((void)current_cost_premium(with_sv, basis), ValidationError);
}

TEST_CASE("interest-equivalent basis") {
    const Basis b1 = lidstone_equivalent_basis(table1_basis(0.03, 0.06), 0.0);
    CHECK(b1.delta == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(*b1.lapse.constant_rate() == 0.0);
    CHECK(lidstone_equivalent_basis(table1_basis(0.03, 0.03), 0.5).delta ==
          doctest::Approx(0.045).epsilon(1e-15));
    CHECK(lidstone_equivalent_basis(table1_basis(0.03, 0.06), 1.0).delta == 0.03);
    CHECK_THROWS_AS((void)lidstone_equivalent_basis(table1_basis(0.03, 0.06), 1.5), ValidationError);
}

TEST_CASE("lapse-supported premium at 3% with 6% lapses equals the 9% premium") {
    const Contract c = term_to_100(35.0, 250000.0);
    const double lapse_supported = solve_level_premium(c, table1_basis(0.03, 0.06));
    const double high_interest = solve_level_premium(c, table1_basis(0.09, 0.0));
    CHECK(std::abs(lapse_supported / high_interest - 1.0) <= 1e-8);
}

TEST_CASE("property: interest equivalence for proportional surrender values") {
    testing::Gen gen(31);
    for (int n = 0; n < testing::kPropertyCases; ++n) {
        const double delta = gen.uniform(0.0, 0.1);
        const double nu = gen.uniform(0.0, 0.1);
        const double k = gen.uniform(0.0, 1.0);
        const double x = gen.uniform(20.0, 70.0);
        const Contract c(x, 100.0 - x, 1000.0, gen.uniform(0.0, 1000.0), SurrenderRule::proportion(k));
        const Basis basis = table1_basis(delta, nu);
        const double p = solve_level_premium(c, basis, 0.05);
        const double q = solve_level_premium(c, lidstone_equivalent_basis(basis, k), 0.05);
        REQUIRE(std::abs(p / q - 1.0) <= 1e-8);
    }
}

TEST_CASE("premium ordering and full-value neutrality on the reference bases") {
    for (double delta : {0.03, 0.06, 0.09}) {
        for (double nu : {0.03, 0.06}) {
            const Basis with = table1_basis(delta, nu);
            const Basis without = table1_basis(delta, 0.0);
            for (double k : {0.0, 0.5}) {
                const Contract c = term_to_100(35.0, 250000.0, SurrenderRule::proportion(k));
                CHECK(solve_level_premium(c, with) <= solve_level_premium(c, without));
            }
            const Contract full = term_to_100(35.0, 250000.0, SurrenderRule::proportion(1.0));
            CHECK(solve_level_premium(full, with) == solve_level_premium(full, without));
        }
    }
}

TEST_CASE("property: full surrender value neutralises lapses") {
    testing::Gen gen(32);
    for (int n = 0; n < testing::kPropertyCases; ++n) {
        const double x = gen.uniform(20.0, 70.0);
        const Contract c(x, 100.0 - x, 1.0, 1.0, SurrenderRule::proportion(1.0));
        const double delta = gen.uniform(0.0, 0.1);
        const double p_star = solve_level_premium(c, table1_basis(delta, gen.uniform(0.001, 0.2)), 0.1);
        const double p = solve_level_premium(c, table1_basis(delta, 0.0), 0.1);
        REQUIRE(p_star == p);
    }
}

TEST_CASE("grid refinement changes reported premiums by less than 1e-6") {
    for (double delta : {0.03, 0.06, 0.09}) {
        for (double nu : {0.0, 0.03, 0.06}) {
            for (double k : {0.0, 0.5}) {
                const Contract c = term_to_100(35.0, 250000.0, SurrenderRule::proportion(k));
                const double coarse = solve_level_premium(c, table1_basis(delta, nu), kDefaultStep);
                const double fine = solve_level_premium(c, table1_basis(delta, nu), kDefaultStep / 2);
                CHECK(std::abs(coarse / fine - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("property: value at issue is affine in the premium") {
    testing::Gen gen(33);
    for (int n = 0; n < testing::kPropertyCases; ++n) {
        const double x = gen.uniform(20.0, 70.0);
        const Contract c(x, 100.0 - x, gen.uniform(1.0, 1e6), gen.uniform(0.0, 1e6),
                         SurrenderRule::proportion(gen.uniform(0.0, 1.0)));
        const Basis basis = table1_basis(gen.uniform(0.0, 0.1), gen.uniform(0.0, 0.1));
        const double v0 = solve_policy_value(c, basis, level_rate(0.0), 0.05).value.front();
        const double v1 = solve_policy_value(c, basis, level_rate(1.0), 0.05).value.front();
        const double v2 = solve_policy_value(c, basis, level_rate(2.0), 0.05).value.front();
        const double scale = std::max({std::abs(v0), std::abs(v1), std::abs(v2)});
        REQUIRE(std::abs((v2 - v1) - (v1 - v0)) <= 1e-10 * scale);
    }
}
