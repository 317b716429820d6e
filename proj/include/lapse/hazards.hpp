#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lapse/grid.hpp"

namespace lapse {

/// Highest age at which any hazard may be evaluated.
inline constexpr double kMaxAge = 120.0;

/// Force of mortality as a function of attained age.
///
/// Two forms are supported: a Gompertz-Makeham law alpha + beta * c^age, and
/// a proportional-hazards multiple of another model. Models are immutable and
/// cheap to copy; a scaled model shares its base.
class MortalityModel {
public:
    enum class Kind { makeham, scaled };

    static MortalityModel makeham(double alpha, double beta, double c);
    static MortalityModel scaled(MortalityModel base, double factor);

    /// Danish G82 males, first-order basis:
    /// 5e-4 + 7.5858e-5 * 10^(0.038 age).
    static MortalityModel gm82_males();
    /// The zero hazard (makeham with alpha = beta = 0).
    static MortalityModel none();

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double c() const noexcept { return c_; }
    double factor() const noexcept { return factor_; }
    const MortalityModel* base() const noexcept { return base_.get(); }

    /// Hazard at `age`; throws DomainError outside [0, kMaxAge].
    double hazard(double age) const;

    /// Hazard without the range check, for inner loops whose ages were
    /// validated up front.
    double hazard_unchecked(double age) const noexcept;

private:
    MortalityModel() = default;

    Kind kind_ = Kind::makeham;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double c_ = 1.0;
    double log_c_ = 0.0;
    double factor_ = 1.0;
    std::shared_ptr<const MortalityModel> base_;
};

/// Lapse intensity. Only constant rates are needed so far, so the age argument
/// is kept for signature symmetry with MortalityModel.
class LapseModel {
public:
    enum class Kind { zero, constant, scaled };

    static LapseModel zero();
    static LapseModel constant(double rate);
    static LapseModel scaled(LapseModel base, double factor);

    Kind kind() const noexcept { return kind_; }
    double factor() const noexcept { return factor_; }
    const LapseModel* base() const noexcept { return base_.get(); }

    double rate(double age) const noexcept;

    /// The rate if it does not depend on age (zero, constant, or a scaled
    /// constant), otherwise nullopt.
    std::optional<double> constant_rate() const noexcept;

private:
    LapseModel() = default;

    Kind kind_ = Kind::zero;
    double rate_ = 0.0;
    double factor_ = 1.0;
    std::shared_ptr<const LapseModel> base_;
};

/// Interest, mortality and lapse assumptions for pricing, valuation or
/// experience.
struct Basis {
    double delta;  ///< constant force of interest
    MortalityModel mortality;
    LapseModel lapse;

    Basis(double delta, MortalityModel mortality, LapseModel lapse);

    /// Same interest and mortality, different lapse model.
    Basis with_lapse(LapseModel other) const;
};

double mortality_hazard(const MortalityModel& model, double age);

/// integral over durations [from, to] of (mu + nu)(entry_age + r) dr by the
/// trapezoid rule on nodes at multiples of `step` measured from duration 0.
double integrated_decrement(const Basis& basis, double entry_age, double from, double to,
                            double step = kDefaultStep);

/// exp(-integral_0^t (delta + mu + nu)): discounting allowing for survivorship.
double survivorship_discount(const Basis& basis, double entry_age, double t,
                             double step = kDefaultStep);

/// The same factor restricted to durations [from, to].
double survivorship_discount(const Basis& basis, double entry_age, double from, double to,
                             double step);

/// tp_x = exp(-integral_0^t (mu + nu)), the probability the policy is still in force.
double in_force_probability(const Basis& basis, double entry_age, double t,
                            double step = kDefaultStep);

/// In-force probabilities at every grid point.
std::vector<double> in_force_path(const Basis& basis, double entry_age, const DurationGrid& grid);

/// Survivorship discount factors at every grid point.
std::vector<double> survivorship_path(const Basis& basis, double entry_age,
                                      const DurationGrid& grid);

}  // namespace lapse
