#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "lapse/contracts.hpp"
#include "lapse/grid.hpp"
#include "lapse/hazards.hpp"

namespace lapse {

/// Premium rate (currency per year) as a function of policy duration.
using RateFunction = std::function<double(double)>;

RateFunction level_rate(double premium);

enum class Regime { level_no_lapse_support, level_lapse_supported, current_cost };

std::string_view to_string(Regime regime) noexcept;

/// Premium and policy value paths of one contract on one basis.
struct PolicyFunctions {
    DurationGrid grid;
    RateFunction premium_rate;    ///< exact premium, for off-grid evaluation
    std::vector<double> premium;  ///< premium_rate sampled on the grid
    std::vector<double> value;    ///< V(t) or V*(t)
    Regime regime;

    /// Linear interpolation of the value path.
    double value_at(double t) const;
};

/// Solves Thiele's equation
///
///   dV/dt = delta V + P(t) - mu (S - V) - nu (C(t) - V)
///
/// backward from V(n) = M with classical RK4 on a uniform grid. A proportion
/// surrender rule C = k V is substituted directly, which turns the lapse term
/// into an extra (1 - k) nu of interest, so no fixed-point iteration is
/// needed. The regime is level_no_lapse_support for a zero-lapse basis and
/// level_lapse_supported otherwise.
///
/// Throws NumericalError if the solution stops being finite.
PolicyFunctions solve_policy_value(const Contract& contract, const Basis& basis,
                                   const RateFunction& premium, double step = kDefaultStep);

/// Constant premium satisfying V(0) = 0. The solution is affine in P, so two
/// solves (P = 0 and P = 1) determine it; a third solve confirms V(0) = 0.
double solve_level_premium(const Contract& contract, const Basis& basis,
                           double step = kDefaultStep);

/// Level premium together with its policy value path.
PolicyFunctions price_level(const Contract& contract, const Basis& basis,
                            double step = kDefaultStep);

/// Premium equal to the mortality cost mu S; the policy value is identically
/// zero. Requires the zero surrender rule.
PolicyFunctions current_cost_premium(const Contract& contract, const Basis& basis,
                                     double step = kDefaultStep);

/// Zero-lapse basis with delta' = delta + (1 - k) nu, equivalent for pricing
/// to `basis` with surrender values k V. Requires a constant lapse rate.
Basis lidstone_equivalent_basis(const Basis& basis, double k);

}  // namespace lapse
