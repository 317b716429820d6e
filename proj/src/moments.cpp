#include "lapse/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "lapse/errors.hpp"
#include "lapse/grid.hpp"
#include "lapse/parallel.hpp"

namespace lapse {

LossMoments unit_loss_moments(const Contract& contract, const Basis& valuation_basis,
                              const RateFunction& charged_premium, const Basis& class_basis,
                              int order, int class_id, double step) {
    if (order != 1 && order != 2) throw ValidationError("loss moments: order must be 1 or 2");
    const DurationGrid grid(contract.term, step);
    const double h = grid.step();
    const double x = contract.entry_age;
    const double sum = contract.sum_insured;
    const double k = contract.surrender.k();

    // State: valuation policy value (drives C = k V), first and second moments.
    using State = std::array<double, 3>;
    auto slope = [&](double t, const State& y) {
        const double age = x + t;
        const double premium = charged_premium(t);
        const double mu_v = valuation_basis.mortality.hazard_unchecked(age);
        const double nu_v = valuation_basis.lapse.rate(age);
        const double mu = class_basis.mortality.hazard_unchecked(age);
        const double nu = class_basis.lapse.rate(age);
        const double c = k * y[0];
        const double d = class_basis.delta;
        State dy{};
        dy[0] = k > 0.0 ? (valuation_basis.delta + (1.0 - k) * nu_v) * y[0] + premium -
                              mu_v * (sum - y[0])
                        : 0.0;
        dy[1] = (d + mu + nu) * y[1] + premium - mu * sum - nu * c;
        dy[2] = order == 2 ? (2.0 * d + mu + nu) * y[2] + 2.0 * premium * y[1] - mu * sum * sum -
                                 nu * c * c
                           : 0.0;
        return dy;
    };
    auto axpy = [](const State& y, double a, const State& dy) {
        return State{y[0] + a * dy[0], y[1] + a * dy[1], y[2] + a * dy[2]};
    };

    const double m = contract.maturity;
    State y{m, m, m * m};
    for (std::size_t i = grid.intervals(); i > 0; --i) {
        const double t = grid.time(i);
        const State k1 = slope(t, y);
        const State k2 = slope(t - 0.5 * h, axpy(y, -0.5 * h, k1));
        const State k3 = slope(t - 0.5 * h, axpy(y, -0.5 * h, k2));
        const State k4 = slope(t - h, axpy(y, -h, k3));
        for (std::size_t j = 0; j < 3; ++j) {
            y[j] -= h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if (!std::isfinite(y[1]) || !std::isfinite(y[2])) {
            throw NumericalError("loss moments: non-finite moment at duration " +
                                 std::to_string(grid.time(i - 1)));
        }
    }
    LossMoments out{y[1], std::nullopt, std::nullopt, class_id};
    if (order == 2) {
        out.m2 = y[2];
        out.variance = y[2] - y[1] * y[1];
    }
    return out;
}

MixtureMoments mixture_variance(std::span<const MixtureClass> classes) {
    if (classes.empty()) throw ValidationError("mixture: no classes");
    MixtureMoments out{0.0, 0.0, {}, {}};
    double weight_total = 0.0;
    double second = 0.0;
    for (const auto& cls : classes) {
        if (!(cls.weight >= 0.0)) throw ValidationError("mixture: weights must be non-negative");
        if (!cls.unit.m2) throw ValidationError("mixture: class lacks a second moment");
        weight_total += cls.weight;
        out.mean += cls.weight * cls.sum_insured * cls.unit.m1;
        second += cls.weight * cls.sum_insured * cls.sum_insured * *cls.unit.m2;
        out.weights.push_back(cls.weight);
        out.sums_insured.push_back(cls.sum_insured);
    }
    if (std::abs(weight_total - 1.0) > 1e-12) throw ValidationError("mixture: weights must sum to 1");
    out.variance = second - out.mean * out.mean;
    return out;
}

void MomentAccumulator::add(double x) noexcept {
    const auto n1 = static_cast<double>(n_);
    ++n_;
    const auto n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
    m3_ += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const auto na = static_cast<double>(n_);
    const auto nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double d = other.mean_ - mean_;
    const double d2 = d * d;
    const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + other.m3_ + d * d2 * na * nb * (na - nb) / (n * n) +
                      3.0 * d * (na * other.m2_ - nb * m2_) / n;
    const double m4 = m4_ + other.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
                      4.0 * d * (na * other.m3_ - nb * m3_) / n;
    mean_ += d * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += other.n_;
}

double MomentAccumulator::variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MomentAccumulator::fourth_central() const noexcept {
    return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0;
}

namespace {

constexpr std::uint64_t kBlockSize = 4096;

/// Grid tables for inverse-transform sampling of one class.
struct ExitTable {
    double step;
    double term;
    double delta;
    double sum;
    double maturity;
    double sum_multiple;
    std::vector<double> cumulative_hazard;
    std::vector<double> premium_annuity;  ///< integral_0^t e^{-delta s} P(s) ds
    std::vector<double> mortality;
    std::vector<double> lapse;
    std::vector<double> surrender;
};

ExitTable build_table(const Contract& contract, const Basis& valuation_basis,
                      const RateFunction& premium, const Basis& basis, double sum_multiple,
                      double step) {
    const DurationGrid grid(contract.term, step);
    const double h = grid.step();
    const double x = contract.entry_age;
    ExitTable table{h,
                    contract.term,
                    basis.delta,
                    contract.sum_insured,
                    contract.maturity,
                    sum_multiple,
                    std::vector<double>(grid.size()),
                    std::vector<double>(grid.size()),
                    std::vector<double>(grid.size()),
                    std::vector<double>(grid.size()),
                    std::vector<double>(grid.size(), 0.0)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        table.mortality[i] = basis.mortality.hazard_unchecked(x + grid.time(i));
        table.lapse[i] = basis.lapse.rate(x + grid.time(i));
    }
    auto discounted = [&](double t) { return std::exp(-basis.delta * t) * premium(t); };
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid.time(i - 1);
        const double b = grid.time(i);
        table.cumulative_hazard[i] =
            table.cumulative_hazard[i - 1] + 0.5 * h * (table.mortality[i - 1] + table.lapse[i - 1] +
                                                        table.mortality[i] + table.lapse[i]);
        table.premium_annuity[i] =
            table.premium_annuity[i - 1] +
            h / 6.0 * (discounted(a) + 4.0 * discounted(0.5 * (a + b)) + discounted(b));
    }
    if (contract.surrender.k() > 0.0) {
        const auto valuation = solve_policy_value(contract, valuation_basis, premium, step);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            table.surrender[i] = contract.surrender.k() * valuation.value[i];
        }
    }
    return table;
}

class UnitStream {
public:
    UnitStream(std::uint64_t seed, std::uint64_t block) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
        engine_.seed(seq);
    }
    /// Uniform on [0, 1).
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

double sample_loss(const ExitTable& table, UnitStream& stream) {
    const double exposure = -std::log1p(-stream.next());
    const auto& lam = table.cumulative_hazard;
    if (exposure >= lam.back()) {
        return table.sum_multiple *
               (std::exp(-table.delta * table.term) * table.maturity - table.premium_annuity.back());
    }
    const auto upper = std::upper_bound(lam.begin(), lam.end(), exposure);
    const auto i = static_cast<std::size_t>(upper - lam.begin()) - 1;
    const double frac = (exposure - lam[i]) / (lam[i + 1] - lam[i]);
    const double tau = (static_cast<double>(i) + frac) * table.step;
    auto lerp = [&](const std::vector<double>& v) { return v[i] + frac * (v[i + 1] - v[i]); };
    const double mu = lerp(table.mortality);
    const double nu = lerp(table.lapse);
    const bool died = stream.next() * (mu + nu) < mu;
    const double benefit = died ? table.sum : lerp(table.surrender);
    return table.sum_multiple *
           (std::exp(-table.delta * tau) * benefit - lerp(table.premium_annuity));
}

SimulationResult summarise(const MomentAccumulator& acc) {
    SimulationResult out{};
    out.paths = acc.count();
    out.mean = acc.mean();
    out.variance = acc.variance();
    const double n = static_cast<double>(acc.count());
    out.standard_error = std::sqrt(out.variance / n);
    out.sd = std::sqrt(out.variance);
    const double var_of_var = std::max(acc.fourth_central() - out.variance * out.variance, 0.0) / n;
    out.sd_standard_error = out.sd > 0.0 ? std::sqrt(var_of_var) / (2.0 * out.sd) : 0.0;
    return out;
}

}  // namespace

SimulationResult simulate_mixture(const Contract& contract, const Basis& valuation_basis,
                                  const RateFunction& charged_premium,
                                  std::span<const SimulationClass> classes,
                                  std::uint64_t path_count, std::uint64_t seed, double step) {
    if (path_count == 0) throw ValidationError("simulation: path count must be >= 1");
    if (classes.empty()) throw ValidationError("simulation: no classes");
    std::vector<ExitTable> tables;
    std::vector<double> cumulative_weight;
    double total = 0.0;
    for (const auto& cls : classes) {
        tables.push_back(build_table(contract, valuation_basis, charged_premium, cls.basis,
                                     cls.sum_multiple, step));
        total += cls.weight;
        cumulative_weight.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("simulation: weights must sum to 1");

    const std::uint64_t blocks = (path_count + kBlockSize - 1) / kBlockSize;
    std::vector<MomentAccumulator> partial(blocks);
    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
        UnitStream stream(seed, b);
        const std::uint64_t begin = b * kBlockSize;
        const std::uint64_t end = std::min(path_count, begin + kBlockSize);
        MomentAccumulator acc;
        for (std::uint64_t p = begin; p < end; ++p) {
            std::size_t cls = 0;
            if (tables.size() > 1) {
                const double u = stream.next() * total;
                while (cls + 1 < tables.size() && u >= cumulative_weight[cls]) ++cls;
            }
            acc.add(sample_loss(tables[cls], stream));
        }
        partial[b] = acc;
    });
    MomentAccumulator all;
    for (const auto& acc : partial) all.merge(acc);
    return summarise(all);
}

SimulationResult simulate_policy(const Contract& contract, const Basis& valuation_basis,
                                 const RateFunction& charged_premium, const Basis& class_basis,
                                 std::uint64_t path_count, std::uint64_t seed, double step) {
    const SimulationClass only{1.0, 1.0, class_basis};
    return simulate_mixture(contract, valuation_basis, charged_premium, std::span(&only, 1),
                            path_count, seed, step);
}

}  // namespace lapse
