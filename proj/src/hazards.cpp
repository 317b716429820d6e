#include "lapse/hazards.hpp"

#include <cmath>
#include <string>

#include "lapse/errors.hpp"

namespace lapse {

MortalityModel MortalityModel::makeham(double alpha, double beta, double c) {
    if (!(c > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(c)) {
        throw ValidationError("makeham: parameters must be finite with c > 0");
    }
    MortalityModel m;
    m.kind_ = Kind::makeham;
    m.alpha_ = alpha;
    m.beta_ = beta;
    m.c_ = c;
    m.log_c_ = std::log(c);
    // beta * c^x is monotone in x, so the endpoints bound the hazard on [0, kMaxAge].
    for (double age : {0.0, kMaxAge}) {
        const double h = m.hazard_unchecked(age);
        if (!std::isfinite(h) || h < 0.0) {
            throw ValidationError("makeham: hazard must be finite and non-negative on [0, 120]");
        }
    }
    return m;
}

MortalityModel MortalityModel::scaled(MortalityModel base, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
        throw ValidationError("scaled mortality: factor must be finite and >= 0");
    }
    MortalityModel m;
    m.kind_ = Kind::scaled;
    m.factor_ = factor;
    m.base_ = std::make_shared<const MortalityModel>(std::move(base));
    return m;
}

MortalityModel MortalityModel::gm82_males() {
    return makeham(5.0e-4, 7.5858e-5, std::pow(10.0, 0.038));
}

MortalityModel MortalityModel::none() { return makeham(0.0, 0.0, 1.0); }

double MortalityModel::hazard(double age) const {
    if (!(age >= 0.0 && age <= kMaxAge)) {
        throw DomainError("mortality hazard: age " + std::to_string(age) + " outside [0, 120]");
    }
    return hazard_unchecked(age);
}

double MortalityModel::hazard_unchecked(double age) const noexcept {
    if (kind_ == Kind::scaled) return factor_ * base_->hazard_unchecked(age);
    return alpha_ + beta_ * std::exp(log_c_ * age);
}

LapseModel LapseModel::zero() { return LapseModel{}; }

LapseModel LapseModel::constant(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ValidationError("constant lapse: rate must be finite and >= 0");
    }
    LapseModel m;
    m.kind_ = Kind::constant;
    m.rate_ = rate;
    return m;
}

LapseModel LapseModel::scaled(LapseModel base, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
        throw ValidationError("scaled lapse: factor must be finite and >= 0");
    }
    LapseModel m;
    m.kind_ = Kind::scaled;
    m.factor_ = factor;
    m.base_ = std::make_shared<const LapseModel>(std::move(base));
    return m;
}

double LapseModel::rate(double age) const noexcept {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return rate_;
        case Kind::scaled: return factor_ * base_->rate(age);
    }
    return 0.0;
}

std::optional<double> LapseModel::constant_rate() const noexcept {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return rate_;
        case Kind::scaled: {
            auto inner = base_->constant_rate();
            if (!inner) return std::nullopt;
            return factor_ * *inner;
        }
    }
    return std::nullopt;
}

Basis::Basis(double delta_, MortalityModel mortality_, LapseModel lapse_)
    : delta(delta_), mortality(std::move(mortality_)), lapse(std::move(lapse_)) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw ValidationError("basis: force of interest must be finite and >= 0");
    }
}

Basis Basis::with_lapse(LapseModel other) const { return Basis(delta, mortality, std::move(other)); }

double mortality_hazard(const MortalityModel& model, double age) { return model.hazard(age); }

namespace {

void check_durations(double entry_age, double from, double to) {
    if (!(from >= 0.0) || !(to >= from)) {
        throw DomainError("survivorship: durations must satisfy 0 <= from <= to");
    }
    if (!(entry_age >= 0.0) || entry_age + to > kMaxAge) {
        throw DomainError("survivorship: ages outside [0, 120]");
    }
}

double decrement_rate(const Basis& basis, double age) {
    return basis.mortality.hazard_unchecked(age) + basis.lapse.rate(age);
}

}  // namespace

double integrated_decrement(const Basis& basis, double entry_age, double from, double to,
                            double step) {
    check_durations(entry_age, from, to);
    if (to == from) return 0.0;
    // Nodes sit at k * step; the first and last segments may be partial.
    double sum = 0.0;
    double a = from;
    double fa = decrement_rate(basis, entry_age + a);
    auto k = static_cast<long long>(std::floor(from / step)) + 1;
    while (true) {
        double b = static_cast<double>(k) * step;
        if (b >= to - 1e-12 * step) b = to;
        const double fb = decrement_rate(basis, entry_age + b);
        sum += 0.5 * (b - a) * (fa + fb);
        if (b == to) break;
        a = b;
        fa = fb;
        ++k;
    }
    return sum;
}

double survivorship_discount(const Basis& basis, double entry_age, double t, double step) {
    return survivorship_discount(basis, entry_age, 0.0, t, step);
}

double survivorship_discount(const Basis& basis, double entry_age, double from, double to,
                             double step) {
    const double decrement = integrated_decrement(basis, entry_age, from, to, step);
    return std::exp(-basis.delta * (to - from) - decrement);
}

double in_force_probability(const Basis& basis, double entry_age, double t, double step) {
    return std::exp(-integrated_decrement(basis, entry_age, 0.0, t, step));
}

std::vector<double> in_force_path(const Basis& basis, double entry_age, const DurationGrid& grid) {
    check_durations(entry_age, 0.0, grid.term());
    std::vector<double> out(grid.size());
    const double h = grid.step();
    double cumulative = 0.0;
    double previous = decrement_rate(basis, entry_age);
    out[0] = 1.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double current = decrement_rate(basis, entry_age + grid.time(i));
        cumulative += 0.5 * h * (previous + current);
        out[i] = std::exp(-cumulative);
        previous = current;
    }
    return out;
}

std::vector<double> survivorship_path(const Basis& basis, double entry_age,
                                      const DurationGrid& grid) {
    auto out = in_force_path(basis, entry_age, grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-basis.delta * grid.time(i));
    return out;
}

}  // namespace lapse
