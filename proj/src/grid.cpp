#include "lapse/grid.hpp"

#include <cmath>

#include "lapse/errors.hpp"

namespace lapse {

DurationGrid::DurationGrid(double term, double requested_step) : term_(term) {
    if (!(term > 0.0) || !std::isfinite(term)) {
        throw ValidationError("duration grid: term must be positive and finite");
    }
    if (!(requested_step > 0.0) || requested_step > term) {
        throw ValidationError("duration grid: step must lie in (0, term]");
    }
    // Round up so the step never exceeds the one requested.
    intervals_ = static_cast<std::size_t>(std::ceil(term / requested_step - 1e-9));
    if (intervals_ == 0) intervals_ = 1;
    step_ = term / static_cast<double>(intervals_);
}

std::vector<double> DurationGrid::times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
    return out;
}

double trapezoid(std::span<const double> values, double step) {
    if (values.size() < 2) return 0.0;
    double inner = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) inner += values[i];
    return step * (inner + 0.5 * (values.front() + values.back()));
}

}  // namespace lapse
