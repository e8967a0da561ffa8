#include "flspde_cli/integral_stats.hpp"

#include "flspde/ito_integrals.hpp"
#include "flspde/random_stream.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace flspde::cli {

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
    double mean(double n) const { return sum / n; }
    double stderr_(double n) const {
        const double m = sum / n;
        const double var = std::max(0.0, (sum_sq / n - m * m) * n / (n - 1.0));
        return std::sqrt(var / n);
    }
};

} // namespace

IntegralStatsResult simulate_integral_statistics(const IntegralStatsConfig& cfg, const CoeffTensor& c3) {
    if (!(cfg.step > 0.0)) throw std::invalid_argument("simulate-integrals: step must be positive");
    if (cfg.paths < 2) throw std::invalid_argument("simulate-integrals: need at least two paths");
    if (cfg.q < 0 || cfg.q1 < 0) throw std::invalid_argument("simulate-integrals: truncations must be non-negative");
    if (cfg.q_hi <= cfg.q || cfg.q1_hi <= cfg.q1)
        throw std::invalid_argument("simulate-integrals: reference truncations must exceed q and q1");
    if (c3.order() != 3 || c3.max_index() < cfg.q1_hi)
        throw std::invalid_argument("simulate-integrals: coefficient tensor does not cover q1_hi");

    const double h = cfg.step;
    const auto unit = UnitStepCoefficients::from(c3);
    const int q_max = std::max(cfg.q_hi, cfg.q1_hi);
    RandomStream stream(cfg.seed, 0);

    Accumulator i1_mean, i1_sq, i01_sq, cross, pair_err, pair_sq, triple_err, triple_sq;
    IntegralStatsResult out;
    constexpr double kTol = 1e-12;
    constexpr std::array<std::array<int, 3>, 6> kPerms{
        {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}}};

    for (int n = 0; n < cfg.paths; ++n) {
        const auto d = draw_basis(stream, 3, q_max);
        const double w1 = approx_I1(d, 1, h);
        const double w2 = approx_I1(d, 2, h);
        const double w3 = approx_I1(d, 3, h);
        const double i01 = approx_I01(d, 1, h);
        i1_mean.add(w1);
        i1_sq.add(w1 * w1);
        i01_sq.add(i01 * i01);
        cross.add(w1 * i01);

        const double lo2 = approx_I11(d, 1, 2, cfg.q, h);
        const double hi2 = approx_I11(d, 1, 2, cfg.q_hi, h);
        pair_err.add((hi2 - lo2) * (hi2 - lo2));
        pair_sq.add(lo2 * lo2);

        const double lo3 = approx_I111(d, 1, 2, 3, cfg.q1, unit, h);
        const double hi3 = approx_I111(d, 1, 2, 3, cfg.q1_hi, unit, h);
        triple_err.add((hi3 - lo3) * (hi3 - lo3));
        triple_sq.add(lo3 * lo3);

        // Identities that hold sample by sample at any finite truncation.
        const double scale = 1.0 + std::abs(w1 * w2);
        out.identity_violations += std::abs(lo2 + approx_I11(d, 2, 1, cfg.q, h) - w1 * w2) > kTol * scale;
        out.identity_violations += std::abs(i01 + approx_I10(d, 1, h) - h * w1) > kTol * (1.0 + std::abs(h * w1));
        double perm_sum = 0.0;
        for (const auto& p : kPerms) perm_sum += approx_I111(d, p[0], p[1], p[2], cfg.q1, unit, h);
        const double prod = w1 * w2 * w3;
        out.identity_violations += std::abs(perm_sum - prod) > kTol * (1.0 + std::abs(prod));
        out.identity_checks += 3;
    }

    const double N = cfg.paths;
    const double r_q = pairwise_residual(cfg.q, h);
    const double r_hi = pairwise_residual(cfg.q_hi, h);
    const double t_q = triple_residual(cfg.q1, h, c3);
    const double t_hi = triple_residual(cfg.q1_hi, h, c3);
    auto add = [&](const char* name, const Accumulator& a, double analytic) {
        out.stats.push_back({name, a.mean(N), a.stderr_(N), analytic});
    };
    add("i1_mean", i1_mean, 0.0);
    add("i1_second_moment", i1_sq, h);
    add("i01_second_moment", i01_sq, h * h * h / 3.0);
    add("i1_i01_cross_moment", cross, h * h / 2.0);
    add("pairwise_ms_error", pair_err, r_q - r_hi);
    add("pairwise_second_moment", pair_sq, h * h / 2.0 - r_q);
    add("triple_ms_error", triple_err, t_q - t_hi);
    add("triple_second_moment", triple_sq, h * h * h / 6.0 - t_q);
    return out;
}

const IntegralStat& find_stat(const IntegralStatsResult& r, const std::string& name) {
    for (const auto& s : r.stats)
        if (s.name == name) return s;
    throw std::invalid_argument("no statistic named '" + name + "'");
}

} // namespace flspde::cli
