#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lapse/contracts.hpp"
#include "lapse/hazards.hpp"
#include "lapse/thiele.hpp"

namespace lapse {

// Sign convention throughout: a loss is PV(outgo) - PV(premium income), so a
// class charged too little has a positive expected loss.

/// Moments of the present value of loss at issue for one homogeneous class.
struct LossMoments {
    double m1;
    std::optional<double> m2;  ///< present for second-order requests
    std::optional<double> variance;
    int class_id = 1;
};

/// First (order 1) or first and second (order 2) moments of the loss on a
/// policy of `contract` charged `charged_premium`, when the class really
/// experiences `class_basis`. Solves the backward moment equations
///
///   dV1/dt = (delta + mu + nu) V1 + P - mu S - nu C
///   dV2/dt = (2 delta + mu + nu) V2 + 2 P V1 - mu S^2 - nu C^2
///
/// with V1(n) = M, V2(n) = M^2, jointly with the policy value on
/// `valuation_basis` that fixes the surrender values C = k V.
LossMoments unit_loss_moments(const Contract& contract, const Basis& valuation_basis,
                              const RateFunction& charged_premium, const Basis& class_basis,
                              int order, int class_id = 1, double step = kDefaultStep);

struct MixtureClass {
    double weight;       ///< pi_j
    double sum_insured;  ///< S_j
    LossMoments unit;    ///< moments per unit sum insured
};

struct MixtureMoments {
    double mean;
    double variance;
    std::vector<double> weights;
    std::vector<double> sums_insured;
};

/// Mean and variance of the loss on a policy drawn at random from a
/// partitioned population: E = sum pi_j S_j E[G_j] and
/// Var = sum pi_j S_j^2 E[G_j^2] - E^2.
MixtureMoments mixture_variance(std::span<const MixtureClass> classes);

/// Running count, mean and central moments up to the fourth. Two
/// accumulators merge exactly, so blocks can be filled independently.
class MomentAccumulator {
public:
    void add(double x) noexcept;
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance.
    double variance() const noexcept;
    /// Fourth central moment (population form).
    double fourth_central() const noexcept;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

struct SimulationResult {
    std::uint64_t paths;
    double mean;
    double variance;
    double standard_error;     ///< of the mean
    double sd;
    double sd_standard_error;  ///< delta-method, from the sample kurtosis
};

struct SimulationClass {
    double weight;
    double sum_multiple;  ///< losses are scaled by this factor
    Basis basis;
};

/// Monte Carlo of the in-force / dead / lapsed model. The first exit time is
/// drawn by inverting the integrated hazard on the grid, the cause by the
/// hazard ratio at that instant. Paths are simulated in fixed blocks with
/// seeds derived from (seed, block), so results depend only on the seed.
SimulationResult simulate_policy(const Contract& contract, const Basis& valuation_basis,
                                 const RateFunction& charged_premium, const Basis& class_basis,
                                 std::uint64_t path_count, std::uint64_t seed,
                                 double step = kDefaultStep);

/// As simulate_policy, but each path first draws its class by weight.
SimulationResult simulate_mixture(const Contract& contract, const Basis& valuation_basis,
                                  const RateFunction& charged_premium,
                                  std::span<const SimulationClass> classes,
                                  std::uint64_t path_count, std::uint64_t seed,
                                  double step = kDefaultStep);

}  // namespace lapse
