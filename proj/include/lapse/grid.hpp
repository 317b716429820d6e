#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lapse {

/// Default integration step in years. Every ODE solve, hazard integral and
/// EPV quadrature in the library shares this grid unless told otherwise.
inline constexpr double kDefaultStep = 1.0 / 240.0;

/// Uniform duration grid 0 = t_0 < t_1 < ... < t_N = term.
///
/// The requested step is rounded so that it divides the term exactly; the
/// effective step is `step()`.
class DurationGrid {
public:
    DurationGrid(double term, double requested_step = kDefaultStep);

    double term() const noexcept { return term_; }
    double step() const noexcept { return step_; }
    /// Number of intervals N.
    std::size_t intervals() const noexcept { return intervals_; }
    /// Number of grid points N + 1.
    std::size_t size() const noexcept { return intervals_ + 1; }
    double time(std::size_t i) const noexcept {
        return i == intervals_ ? term_ : static_cast<double>(i) * step_;
    }
    std::vector<double> times() const;

    friend bool operator==(const DurationGrid&, const DurationGrid&) = default;

private:
    double term_;
    std::size_t intervals_;
    double step_;
};

/// Composite trapezoid rule for samples on a uniform grid.
double trapezoid(std::span<const double> values, double step);

}  // namespace lapse
