#include <doctest.h>

#include "lapse/contracts.hpp"
#include "lapse/errors.hpp"
#include "support.hpp"

using namespace lapse;

TEST_CASE("surrender values") {
    CHECK(surrender_value(SurrenderRule::zero(), 10.0, 5000.0) == 0.0);
    CHECK(surrender_value(SurrenderRule::zero(), 0.0, 0.0) == 0.0);
    CHECK(surrender_value(SurrenderRule::proportion(1.0), 10.0, 5000.0) == 5000.0);
    CHECK(surrender_value(SurrenderRule::proportion(0.5), 10.0, 5000.0) == 2500.0);
}

TEST_CASE("surrender rule validation happens at construction") {
    CHECK_THROWS_AS(SurrenderRule::proportion(1.01), ValidationError);
    CHECK_THROWS_AS(SurrenderRule::proportion(-0.01), ValidationError);
    CHECK_NOTHROW(SurrenderRule::proportion(0.0));
    CHECK_THROWS_AS((void)surrender_value(SurrenderRule::proportion(0.5), -1.0, 10.0), DomainError);
    CHECK_THROWS_AS((void)surrender_value(SurrenderRule::proportion(0.5), 1.0, -10.0), DomainError);
}

TEST_CASE("contract invariants") {
    CHECK_THROWS_AS(Contract(35, 0, 1, 1), ValidationError);
    CHECK_THROWS_AS(Contract(35, 65, -1, 1), ValidationError);
    CHECK_THROWS_AS(Contract(35, 65, 1, -1), ValidationError);
    CHECK_THROWS_AS(Contract(35, 90, 1, 1), ValidationError);
    CHECK_THROWS_AS(Contract(35, 65, 1, 0, SurrenderRule::proportion(0.5), PremiumForm::mortality_cost),
                    ValidationError);
    CHECK_NOTHROW(Contract(35, 65, 1, 0, SurrenderRule::zero(), PremiumForm::mortality_cost));

    const Contract t100 = term_to_100(35.0, 250000.0);
    CHECK(t100.term == 65.0);
    CHECK(t100.maturity == 250000.0);
    CHECK(t100.end_age() == 100.0);
    const Contract half = t100.scaled(0.5);
    CHECK(half.sum_insured == 125000.0);
    CHECK(half.maturity == 125000.0);
}

TEST_CASE("property: surrender value is monotone and bounded by the policy value") {
    testing::Gen gen(21);
    for (int n = 0; n < testing::kPropertyCases; ++n) {
        const auto rule = gen.coin() ? SurrenderRule::zero() : SurrenderRule::proportion(gen.uniform(0.0, 1.0));
        const double t = gen.uniform(0.0, 65.0);
        const double a = gen.uniform(0.0, 1e6);
        const double b = a + gen.uniform(0.0, 1e6);
        const double ca = surrender_value(rule, t, a);
        const double cb = surrender_value(rule, t, b);
        REQUIRE(ca <= cb);
        REQUIRE(ca >= 0.0);
        REQUIRE(ca <= a);
    }
}
