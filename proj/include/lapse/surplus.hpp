#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lapse/contracts.hpp"
#include "lapse/grid.hpp"
#include "lapse/hazards.hpp"
#include "lapse/thiele.hpp"

namespace lapse {

/// Rate of emerging surplus per policy in force and its EPV on the
/// experience basis.
struct SurplusPath {
    DurationGrid grid;
    std::vector<double> rate;
    double epv;
};

/// Surrender values C(t) = k V(t) along a solved value path.
std::vector<double> surrender_path(const SurrenderRule& rule, const PolicyFunctions& valuation);

/// Surplus emerging when experience follows `experience_basis` but policy
/// values are held on `valuation_basis`:
///
///   W = (delta' - delta) V - (mu' - mu)(S - V) - (nu' - nu)(C - V)
///       + (charged premium - valuation premium)
///
/// With a zero-lapse valuation basis and matched interest and mortality this
/// is the pure lapse surplus -nu'(C - V). `surrender_values` and
/// `charged_premium` must lie on the valuation grid; an empty charged premium
/// means the valuation premium is the one charged.
SurplusPath surplus_rate(const Contract& contract, const PolicyFunctions& valuation,
                         const Basis& valuation_basis, const Basis& experience_basis,
                         std::span<const double> surrender_values,
                         std::span<const double> charged_premium = {});

/// As above with C(t) = k V(t) from `surrender`.
SurplusPath surplus_rate(const Contract& contract, const PolicyFunctions& valuation,
                         const Basis& valuation_basis, const Basis& experience_basis,
                         const SurrenderRule& surrender);

struct PremiumReductionCheck {
    double premium_reduction_epv;  ///< integral phi (P - P*)
    double value_release_epv;      ///< integral phi nu' (V - V*)
    double lapse_cash_epv;         ///< integral phi nu (V* - C)
    double residual;               ///< lhs - rhs of the full identity
    /// lhs - integral phi nu (V - C); only when experienced lapses equal the
    /// premium-basis lapses.
    std::optional<double> simplified_residual;
};

/// Checks that the EPV of the premium reduction P - P* equals the EPV of
/// policy values released by experienced lapses plus the EPV of anticipated
/// lapse profits, with discounting on the experience basis. Surrender values
/// are C = k V* from the contract's rule.
PremiumReductionCheck verify_premium_reduction_identity(const Contract& contract,
                                                        const PolicyFunctions& pricing_no_lapse,
                                                        const PolicyFunctions& pricing_lapse,
                                                        const Basis& premium_basis,
                                                        const Basis& experience_basis);

/// Residual of integral d (P - P*) = integral d nu (V - C) for an arbitrary
/// discount path `discount` on the pricing grid. Holds for the premium-basis
/// survivorship discount exp(-integral (delta + mu + nu)).
double premium_reduction_residual(const Contract& contract, const PolicyFunctions& pricing_no_lapse,
                                  const PolicyFunctions& pricing_lapse, const Basis& premium_basis,
                                  std::span<const double> discount);

struct ValuationInvariance {
    double epv_premium_basis;  ///< EPV of W, valuing on the no-lapse premium basis
    double epv_net_premium;    ///< EPV of W*, net premium valuation with P*
};

/// EPV of emerging surplus on the experience basis under the two valuation
/// bases, with contractual premium P (no lapse support) in both.
/// `premium_basis` carries the lapse rate used for the net premium P*.
ValuationInvariance verify_valuation_invariance(const Contract& contract,
                                                const Basis& premium_basis,
                                                const LapseModel& experience_lapse,
                                                double step = kDefaultStep);

struct ProfitLoss {
    double max_profit_pct;
    double max_loss_pct;
};

/// Max Profit: premium without lapse support charged while lapses occur at the
/// premium-basis rate, nothing paid on surrender, as a percentage of the EPV
/// of premiums. Max Loss: lapse-supported premium charged while no lapses
/// occur, measured against the full release of V* the premium anticipated.
/// Both are zero when surrender values are the full policy value.
ProfitLoss max_profit_loss(const Contract& contract, const Basis& lapse_supported_basis,
                           double step = kDefaultStep);

}  // namespace lapse
