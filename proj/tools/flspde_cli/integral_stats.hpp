#pragma once

#include "flspde/coeff_tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flspde::cli {

struct IntegralStatsConfig {
    double step = 0.25;
    int q = 2;
    int q1 = 1;
    /// Surrogate truncations standing in for the exact double and triple integrals.
    int q_hi = 200;
    int q1_hi = 12;
    int paths = 100000;
    std::uint64_t seed = 1;
};

struct IntegralStat {
    std::string name;
    double empirical = 0.0;
    double stderr_ = 0.0; ///< CLT standard error of the empirical mean
    double analytic = 0.0;
};

struct IntegralStatsResult {
    std::vector<IntegralStat> stats;
    std::int64_t identity_violations = 0;
    std::int64_t identity_checks = 0;
};

/// Monte Carlo moments of the low-order integrals over three distinct
/// components, compared against their analytic values. The mean-square
/// truncation errors use the q_hi / q1_hi approximations as the reference, so
/// their analytic counterparts are residual(q) - residual(q_hi).
/// `c3` must be an order-3 tensor covering q1_hi.
IntegralStatsResult simulate_integral_statistics(const IntegralStatsConfig& cfg, const CoeffTensor& c3);

const IntegralStat& find_stat(const IntegralStatsResult& r, const std::string& name);

} // namespace flspde::cli
