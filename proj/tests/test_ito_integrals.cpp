#include "flspde/ito_integrals.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <algorithm>
#include <map>
#include <numeric>
#include <set>

using namespace flspde;
using Catch::Approx;

namespace {

const CoeffTensor& tensor3(int q) {
    static std::map<int, CoeffTensor> cache;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, CoeffTensor::build(3, q)).first;
    return it->second;
}

const UnitStepCoefficients& unit3(int q) {
    static std::map<int, UnitStepCoefficients> cache;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, UnitStepCoefficients::from(tensor3(q))).first;
    return it->second;
}

} // namespace

TEST_CASE("substream seeding") {
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
    RandomStream a(42, 7), b(42, 7), c(42, 8);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
}

TEST_CASE("draw_basis is reproducible") {
    RandomStream s1(123, 0), s2(123, 0);
    const auto d1 = draw_basis(s1, 3, 5);
    const auto d2 = draw_basis(s2, 3, 5);
    CHECK(d1.values == d2.values);
    CHECK(d1.values.size() == 18);
    CHECK_THROWS(draw_basis(s1, 0, 1));
}

TEST_CASE("draws are standard normal and uncorrelated") {
    const int N = 100000;
    RandomStream s(2024, 0);
    const int m = 2, q = 2;
    const int cells = m * (q + 1);
    std::vector<double> sum(cells, 0.0), sum2(cells, 0.0), cross(cells * cells, 0.0);
    for (int n = 0; n < N; ++n) {
        const auto d = draw_basis(s, m, q);
        for (int a = 0; a < cells; ++a) {
            sum[a] += d.values[a];
            sum2[a] += d.values[a] * d.values[a];
            for (int b = a + 1; b < cells; ++b) cross[a * cells + b] += d.values[a] * d.values[b];
        }
    }
    for (int a = 0; a < cells; ++a) {
        const double mean = sum[a] / N;
        const double var = sum2[a] / N - mean * mean;
        CHECK(std::abs(mean) < 3.0 / std::sqrt(N));
        CHECK(var >= 0.99);
        CHECK(var <= 1.01);
        for (int b = a + 1; b < cells; ++b) {
            const double mb = sum[b] / N;
            const double vb = sum2[b] / N - mb * mb;
            const double corr = (cross[a * cells + b] / N - mean * mb) / std::sqrt(var * vb);
            CHECK(std::abs(corr) < 0.01);
        }
    }
}

TEST_CASE("low-order integrals on fixed draws") {
    auto d = GaussianBasisDraws::zeros(2, 3);
    d(1, 0) = 1.0;
    CHECK(approx_I1(d, 1, 4.0) == Approx(2.0));
    CHECK(approx_I1(d, 2, 4.0) == 0.0);
    CHECK(approx_I01(d, 1, 1.0) == Approx(0.5));
    CHECK(approx_I10(d, 1, 1.0) == Approx(0.5));
    CHECK_THROWS_AS(approx_I1(d, 3, 1.0), std::out_of_range);
    CHECK_THROWS_AS(approx_I1(d, 0, 1.0), std::out_of_range);
    CHECK_THROWS_AS(approx_I01(GaussianBasisDraws::zeros(1, 0), 1, 1.0), std::invalid_argument);
}

TEST_CASE("all-zero draws force the indicator terms") {
    const auto z = GaussianBasisDraws::zeros(3, 6);
    CHECK(approx_I11(z, 2, 2, 4, 0.3) == Approx(-0.15));
    CHECK(approx_I11(z, 1, 2, 4, 0.3) == 0.0);
    CHECK(approx_I111(z, 1, 2, 3, 6, unit3(6), 0.5) == 0.0);
    // Equal indices: (1/6) step^{3/2} (0 - 0) = 0 at zeta = 0.
    CHECK(approx_I111(z, 1, 1, 1, 6, unit3(6), 0.5) == Approx(0.0).margin(1e-15));
}

TEST_CASE("exact algebraic identities per sample") {
    RandomStream s(99, 0);
    const double step = 0.37;
    const int q = 9;
    for (int n = 0; n < 10000; ++n) {
        const auto d = draw_basis(s, 3, q);
        for (int r1 = 1; r1 <= 3; ++r1) {
            CHECK(approx_I01(d, r1, step) + approx_I10(d, r1, step) ==
                  Approx(step * approx_I1(d, r1, step)).margin(1e-12));
            for (int r2 = 1; r2 <= 3; ++r2) {
                for (int qq : {0, 1, 4, q}) {
                    const double lhs = approx_I11(d, r1, r2, qq, step) + approx_I11(d, r2, r1, qq, step) +
                                       (r1 == r2 ? step : 0.0);
                    CHECK(lhs == Approx(step * d(r1, 0) * d(r2, 0)).margin(1e-12));
                }
            }
        }
        if (n > 200) continue;
        // Equal-index triple integral equals the Hermite form at every truncation.
        for (int q1 : {0, 2, 6})
            CHECK(approx_I111(d, 2, 2, 2, q1, unit3(6), step) ==
                  Approx(hermite_closed_form(3, std::sqrt(step) * d(2, 0), step)).margin(1e-12));
    }
}

TEST_CASE("bundle agrees with the scalar formulas") {
    RandomStream s(5, 1);
    const auto d = draw_basis(s, 4, 6);
    BundleRequest req;
    req.M = 4;
    req.q = 5;
    req.q1 = 3;
    const auto b = build_bundle(d, req, unit3(6), 0.2);
    for (int r1 = 1; r1 <= 4; ++r1) {
        CHECK(b.i1(r1) == Approx(approx_I1(d, r1, 0.2)).margin(1e-15));
        CHECK(b.i01(r1) == Approx(approx_I01(d, r1, 0.2)).margin(1e-15));
        CHECK(b.i10(r1) == Approx(approx_I10(d, r1, 0.2)).margin(1e-15));
        for (int r2 = 1; r2 <= 4; ++r2) {
            CHECK(b.i11(r1, r2) == Approx(approx_I11(d, r1, r2, 5, 0.2)).margin(1e-14));
            for (int r3 = 1; r3 <= 4; ++r3)
                CHECK(b.i111(r1, r2, r3) == Approx(approx_I111(d, r1, r2, r3, 3, unit3(6), 0.2)).margin(1e-14));
        }
    }
    req.M = 5;
    CHECK_THROWS(build_bundle(d, req, unit3(6), 0.2));
    req.M = 4;
    req.q1 = 7;
    CHECK_THROWS(build_bundle(d, req, unit3(6), 0.2));
    req.triples = false;
    CHECK_FALSE(build_bundle(d, req, unit3(6), 0.2).has_triples());
    req.max_M = 2;
    CHECK_THROWS(build_bundle(d, req, unit3(6), 0.2));
}

TEST_CASE("pair partitions") {
    CHECK(enumerate_pair_partitions(2, 1).size() == 1);
    CHECK(enumerate_pair_partitions(4, 1).size() == 6);
    CHECK(enumerate_pair_partitions(4, 2).size() == 3);
    CHECK(enumerate_pair_partitions(5, 1).size() == 10);
    CHECK(enumerate_pair_partitions(5, 2).size() == 15);
    CHECK(enumerate_pair_partitions(3, 0).size() == 1);
    CHECK_THROWS(enumerate_pair_partitions(3, 2));
    auto fact = [](int n) {
        long f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    for (int k = 0; k <= 8; ++k)
        for (int r = 0; 2 * r <= k; ++r) {
            const auto parts = enumerate_pair_partitions(k, r);
            CHECK(static_cast<long>(parts.size()) == fact(k) / (fact(k - 2 * r) * fact(r) * (1L << r)));
            std::set<std::vector<int>> seen;
            for (const auto& p : parts) {
                std::vector<int> key, all;
                for (auto [a, b] : p.pairs) {
                    CHECK(a < b);
                    key.insert(key.end(), {a, b});
                    all.insert(all.end(), {a, b});
                }
                all.insert(all.end(), p.singles.begin(), p.singles.end());
                std::sort(all.begin(), all.end());
                std::vector<int> expect(k);
                std::iota(expect.begin(), expect.end(), 1);
                CHECK(all == expect);
                CHECK(seen.insert(key).second);
            }
        }
}

TEST_CASE("partition expansion reduces to the explicit formulas") {
    RandomStream s(77, 3);
    const double step = 0.3;
    const auto c2 = tensor_accessor(CoeffTensor::build(2, 6), step);
    const auto c3 = tensor_accessor(tensor3(4), step);
    const auto one = [step](std::span<const int> j) { return j[0] == 0 ? std::sqrt(step) : 0.0; };
    for (int n = 0; n < 200; ++n) {
        const auto d = draw_basis(s, 2, 6);
        for (int r1 = 1; r1 <= 2; ++r1) {
            const int i1[1] = {r1};
            const int p1[1] = {6};
            CHECK(approx_general_k(d, i1, p1, one, step) == Approx(approx_I1(d, r1, step)).margin(1e-14));
            for (int r2 = 1; r2 <= 2; ++r2) {
                const int i2[2] = {r1, r2};
                const int p2[2] = {6, 6};
                CHECK(approx_general_k(d, i2, p2, c2, step) == Approx(approx_I11(d, r1, r2, 6, step)).margin(1e-14));
                for (int r3 = 1; r3 <= 2; ++r3) {
                    const int i3[3] = {r1, r2, r3};
                    const int p3[3] = {4, 4, 4};
                    CHECK(approx_general_k(d, i3, p3, c3, step) ==
                          Approx(approx_I111(d, r1, r2, r3, 4, unit3(4), step)).margin(1e-14));
                }
            }
        }
    }
}

TEST_CASE("partition expansion signs and time component") {
    const auto z = GaussianBasisDraws::zeros(1, 2);
    // Constant coefficient on the diagonal j = (0,0,0,0) only.
    const auto diag = [](std::span<const int> j) {
        return std::all_of(j.begin(), j.end(), [](int v) { return v == 0; }) ? 1.0 : 0.0;
    };
    const int i4[4] = {1, 1, 1, 1};
    const int p4[4] = {1, 1, 1, 1};
    // Only the three double pairings survive at zero draws, each with sign +1.
    CHECK(approx_general_k(z, i4, p4, diag, 1.0) == Approx(3.0));
    const int i2[2] = {1, 1};
    const int p2[2] = {1, 1};
    CHECK(approx_general_k(z, i2, p2, diag, 1.0) == Approx(-1.0));
    // The time component never pairs.
    const int i0[2] = {0, 0};
    CHECK(approx_general_k(z, i0, p2, diag, 4.0) == Approx(4.0));
    // I_(01) has kernel coefficients C_{j2 j1} with j1 on the time component.
    RandomStream s(8, 8);
    const auto d = draw_basis(s, 1, 3);
    const auto c2 = tensor_accessor(CoeffTensor::build(2, 3), 0.5);
    const int i01[2] = {0, 1};
    const int i10[2] = {1, 0};
    const int p[2] = {3, 3};
    CHECK(approx_general_k(d, i01, p, c2, 0.5) == Approx(approx_I01(d, 1, 0.5)).margin(1e-14));
    CHECK(approx_general_k(d, i10, p, c2, 0.5) == Approx(approx_I10(d, 1, 0.5)).margin(1e-14));
    const int bad[2] = {2, 1};
    CHECK_THROWS(approx_general_k(d, bad, p, c2, 0.5));
}

TEST_CASE("hermite closed forms") {
    CHECK(hermite_closed_form(2, 1.0, 1.0) == 0.0);
    CHECK(hermite_closed_form(4, 0.0, 1.0) == Approx(0.125));
    CHECK(hermite_closed_form(1, 0.37, 2.0) == 0.37);
    CHECK(hermite_closed_form(3, 2.0, 0.5) == Approx((8.0 - 3.0) / 6.0));
    for (int k = 1; k <= 5; ++k) {
        long f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        CHECK(hermite_closed_form(k, 0.7, 0.3) == Approx(oracle::hermite_prob(k, 0.7, 0.3) / f));
    }
    CHECK_THROWS(hermite_closed_form(6, 0.0, 1.0));
    CHECK_THROWS(hermite_closed_form(2, 0.0, -1.0));
}

TEST_CASE("moments of the low-order integrals", "[statistical]") {
    const int N = 100000;
    const double step = 0.5;
    RandomStream s(31337, 0);
    double s11 = 0, s12 = 0, s22 = 0;
    for (int n = 0; n < N; ++n) {
        const auto d = draw_basis(s, 1, 1);
        const double a = approx_I1(d, 1, step);
        const double b = approx_I01(d, 1, step);
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
    }
    CHECK(s11 / N == Approx(step).epsilon(0.05));
    CHECK(s12 / N == Approx(step * step / 2).epsilon(0.05));
    CHECK(s22 / N == Approx(step * step * step / 3).epsilon(0.05));
}

TEST_CASE("mean-square truncation errors match the residual formulas", "[statistical]") {
    const int N = 100000;
    const double step = 0.25;
    const int q_lo = 3, q_hi = 40, q1_lo = 1, q1_hi = 12;
    const auto& c = unit3(q1_hi);
    RandomStream s(4242, 0);
    double e2 = 0, e3 = 0, m3 = 0;
    for (int n = 0; n < N; ++n) {
        const auto d = draw_basis(s, 3, q_hi);
        const double a = approx_I11(d, 1, 2, q_hi, step) - approx_I11(d, 1, 2, q_lo, step);
        e2 += a * a;
        const double lo = approx_I111(d, 1, 2, 3, q1_lo, c, step);
        const double b = approx_I111(d, 1, 2, 3, q1_hi, c, step) - lo;
        e3 += b * b;
        m3 += lo * lo;
    }
    CHECK(e2 / N == Approx(pairwise_residual(q_lo, step) - pairwise_residual(q_hi, step)).epsilon(0.05));
    const auto& t = tensor3(q1_hi);
    CHECK(e3 / N == Approx(triple_residual(q1_lo, step, t) - triple_residual(q1_hi, step, t)).epsilon(0.05));
    CHECK(m3 / N == Approx(std::pow(step, 3) / 6 - triple_residual(q1_lo, step, t)).epsilon(0.05));
}
