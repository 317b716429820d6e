#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace lapse::testing {

/// Number of generated cases per property.
inline constexpr int kPropertyCases = 100;

/// Small seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(rng_);
    }

    int integer(int lo, int hi) {
        return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    template <class T>
    const T& pick(std::span<const T> items) {
        return items[rng_() % items.size()];
    }

    bool coin() { return (rng_() & 1u) != 0; }

private:
    std::mt19937_64 rng_;
};

}  // namespace lapse::testing
