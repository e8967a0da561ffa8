#include "flspde/qwiener.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace flspde;
using Catch::Approx;

namespace {

TruncatedSpectrum unit_spectrum(int M) { return truncate_spectrum(QWienerSpec::explicit_list(std::vector<double>(M + 1, 1.0)), M); }

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

} // namespace

TEST_CASE("spectrum laws") {
    const auto p = QWienerSpec::power_law(1.0, 2.0);
    const auto t = truncate_spectrum(p, 10);
    CHECK(t.M() == 10);
    CHECK(t.tail_sup == Approx(1.0 / 121.0));
    CHECK(t.eigenvalues[2] == Approx(1.0 / 9.0));
    CHECK(p.trace() == Approx(std::numbers::pi * std::numbers::pi / 6.0));
    CHECK(QWienerSpec::geometric(1.0, 0.5).trace() == Approx(1.0));
    CHECK(QWienerSpec::geometric(1.0, 0.5).eigenvalue(3) == Approx(0.125));
    CHECK_THROWS_AS(QWienerSpec::explicit_list({3.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(QWienerSpec::explicit_list({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(QWienerSpec::power_law(1.0, 1.0), std::invalid_argument);
    const auto e = QWienerSpec::explicit_list({3.0, 2.0, 1.0});
    CHECK(truncate_spectrum(e, 2).tail_sup == 1.0);
    CHECK(truncate_spectrum(e, 3).tail_sup == 0.0);
    CHECK(e.trace() == 6.0);
    CHECK_THROWS(truncate_spectrum(e, 4));
    CHECK_THROWS(truncate_spectrum(p, 0));
    for (int M = 1; M < 50; ++M) CHECK(truncate_spectrum(p, M + 1).tail_sup <= truncate_spectrum(p, M).tail_sup);
}

TEST_CASE("truncation parameters") {
    TruncationParams t;
    CHECK_NOTHROW(t.validate());
    t.M = 0;
    CHECK_THROWS(t.validate());
    t.M = 1;
    t.q1 = -1;
    CHECK_THROWS(t.validate());
    t.q1 = 0;
    t.alpha = 0.0;
    CHECK_THROWS(t.validate());
}

TEST_CASE("bound helpers") {
    CHECK(theorem3_bound(1.0, 1.0, 2, 0.0) == 0.0);
    CHECK(theorem3_bound(1.0, 1.0, 2, 0.25) == Approx(1.0));
    CHECK(theorem3_bound(2.0, 0.5, 3, 0.1) == Approx(2.0 * 36.0 * 0.125 * 0.1));
    const auto p = QWienerSpec::power_law(1.0, 2.0);
    CHECK(theorem4_tail(p, 10, 0.5) == Approx(1.0 / 121.0));
    CHECK(theorem4_tail(p, 10, 1.0) == Approx(1.0 / 14641.0));
    CHECK(theorem4_tail(p, 4000, 0.5) / theorem4_tail(p, 8000, 0.5) == Approx(4.0).epsilon(1e-3));
    CHECK_THROWS(theorem4_tail(p, 10, 0.0));
}

TEST_CASE("image arrays") {
    ImageArray a(3, 2, 2);
    a.at(2, 1)[0] = 5.0;
    CHECK(a.data()[2 * 3] == 5.0);
    CHECK_THROWS_AS(a.at(3, 1), std::out_of_range);
    CHECK_THROWS_AS(a.at(1), std::invalid_argument);
    CHECK_THROWS(ImageArray(3, 2, 4));
}

TEST_CASE("single-integral assemblies on fixed draws") {
    const auto s = unit_spectrum(1);
    ImageArray e(2, 1, 1);
    e.at(1)[0] = 1.0;
    auto d = GaussianBasisDraws::zeros(1, 1);
    d(1, 0) = 2.0;
    CHECK(assemble_J1(e, d, s, 1.0) == std::vector<double>{2.0, 0.0});
    const auto zero = GaussianBasisDraws::zeros(1, 1);
    CHECK(assemble_J1(e, zero, s, 1.0) == std::vector<double>{0.0, 0.0});
    CHECK(assemble_J2(e, zero, s, 1.0) == std::vector<double>{0.0, 0.0});
    auto d1 = GaussianBasisDraws::zeros(1, 1);
    d1(1, 1) = std::sqrt(3.0);
    CHECK(assemble_J2(e, d1, s, 1.0)[0] == Approx(-0.5));
    auto d0 = GaussianBasisDraws::zeros(1, 1);
    d0(1, 0) = 1.0;
    CHECK(assemble_J3(e, d0, s, 1.0)[0] == Approx(0.5));
    CHECK(assemble_J4(e, d0, s, 1.0)[0] == Approx(0.5));
    ImageArray wrong(2, 2, 1);
    CHECK_THROWS(assemble_J1(wrong, d, s, 1.0));
}

TEST_CASE("single-integral assemblies agree with the scalar integrals") {
    RandomStream rs(11, 0);
    const auto spec = QWienerSpec::power_law(1.0, 2.0);
    const auto s = truncate_spectrum(spec, 4);
    const double h = 0.3;
    ImageArray img(3, 4, 1);
    for (double& v : img.data()) v = rs.normal();
    for (int n = 0; n < 200; ++n) {
        const auto d = draw_basis(rs, 4, 2);
        const auto j1 = assemble_J1(img, d, s, h);
        const auto j2 = assemble_J2(img, d, s, h);
        const auto j3 = assemble_J3(img, d, s, h);
        const auto j4 = assemble_J4(img, d, s, h);
        std::vector<double> e1(3, 0.0), e2(3, 0.0), e3(3, 0.0), e4(3, 0.0);
        for (int r = 1; r <= 4; ++r) {
            const double sl = std::sqrt(spec.eigenvalue(r));
            const double i1 = approx_I1(d, r, h), i01 = approx_I01(d, r, h), i10 = approx_I10(d, r, h);
            for (int k = 0; k < 3; ++k) {
                const double v = img.at(r)[k] * sl;
                e1[k] += v * i1;
                // A(int int dW ds - h/2 int dW) with int_t^T int_t^s dW ds = I10.
                e2[k] += v * (i10 - 0.5 * h * i1);
                e3[k] += v * i01;
                e4[k] += v * i10;
            }
        }
        for (int k = 0; k < 3; ++k) {
            CHECK(j1[k] == Approx(e1[k]).margin(1e-13));
            CHECK(j2[k] == Approx(e2[k]).margin(1e-13));
            CHECK(j3[k] == Approx(e3[k]).margin(1e-13));
            CHECK(j4[k] == Approx(e4[k]).margin(1e-13));
            CHECK(j3[k] + j4[k] == Approx(std::pow(h, 1.0) * e1[k]).margin(1e-13));
        }
    }
}

TEST_CASE("double-integral assembly") {
    const auto s = unit_spectrum(1);
    ImageArray img(1, 1, 2);
    img.at(1, 1)[0] = 1.0;
    auto d = GaussianBasisDraws::zeros(1, 3);
    d(1, 0) = 1.7;
    BundleRequest req;
    req.M = 1;
    req.q = 3;
    req.triples = false;
    const auto b = build_bundle(d, req, {}, 0.4);
    CHECK(assemble_I1(img, b, s)[0] == Approx(0.2 * (1.7 * 1.7 - 1.0)));
    ImageArray zero(1, 1, 2);
    CHECK(assemble_I1(zero, b, s)[0] == 0.0);
    ImageArray img3(1, 1, 3);
    CHECK_THROWS(assemble_I2(img3, b, s));
}

TEST_CASE("triple-integral assemblies") {
    const auto c3 = UnitStepCoefficients::from(CoeffTensor::build(3, 3));
    const auto s1 = unit_spectrum(1);
    ImageArray img(2, 1, 3);
    img.at(1, 1, 1)[0] = 1.0;
    img.at(1, 1, 1)[1] = -2.0;
    BundleRequest req;
    req.M = 1;
    req.q = 2;
    req.q1 = 3;
    const auto zb = build_bundle(GaussianBasisDraws::zeros(1, 3), req, c3, 0.5);
    CHECK(assemble_I3(img, zb, s1) == std::vector<double>{0.0, 0.0});
    CHECK(assemble_I2(img, zb, s1)[0] == Approx(0.0).margin(1e-15));

    // M = 1 reduces to the equal-index closed form.
    RandomStream rs(12, 0);
    const auto d1 = draw_basis(rs, 1, 3);
    const auto b1 = build_bundle(d1, req, c3, 0.5);
    const double closed = hermite_closed_form(3, std::sqrt(0.5) * d1(1, 0), 0.5);
    CHECK(assemble_I2(img, b1, s1)[0] == Approx(closed).margin(1e-14));

    // Pairwise-distinct spectrum: zero draws give zero.
    const auto spec = QWienerSpec::power_law(1.0, 2.0);
    const auto s3 = truncate_spectrum(spec, 3);
    ImageArray big(2, 3, 3);
    for (double& v : big.data()) v = rs.normal();
    req.M = 3;
    const auto z3 = build_bundle(GaussianBasisDraws::zeros(3, 3), req, c3, 0.5);
    CHECK(norm2(assemble_I2(big, z3, s3)) == Approx(0.0).margin(1e-28));

    const auto d = draw_basis(rs, 3, 3);
    const auto b = build_bundle(d, req, c3, 0.5);
    // Linearity in images.
    ImageArray twice = big;
    for (double& v : twice.data()) v *= 2.0;
    ImageArray other(2, 3, 3);
    for (double& v : other.data()) v = rs.normal();
    ImageArray sum = big;
    for (std::size_t k = 0; k < sum.data().size(); ++k) sum.data()[k] += other.data()[k];
    for (auto f : {assemble_I2, assemble_I3}) {
        const auto base = f(big, b, s3);
        const auto dbl = f(twice, b, s3);
        const auto oth = f(other, b, s3);
        const auto tot = f(sum, b, s3);
        for (int k = 0; k < 2; ++k) {
            CHECK(dbl[k] == Approx(2.0 * base[k]).margin(1e-14));
            CHECK(tot[k] == Approx(base[k] + oth[k]).margin(1e-14));
        }
    }
    // Symmetrised images give a result invariant under swapping r1 and r2.
    ImageArray sym(2, 3, 3), swapped(2, 3, 3);
    for (int r1 = 1; r1 <= 3; ++r1)
        for (int r2 = 1; r2 <= 3; ++r2)
            for (int r3 = 1; r3 <= 3; ++r3)
                for (int k = 0; k < 2; ++k) {
                    sym.at(r1, r2, r3)[k] = big.at(r1, r2, r3)[k] + big.at(r2, r1, r3)[k];
                    swapped.at(r2, r1, r3)[k] = sym.at(r1, r2, r3)[k];
                }
    const auto a1 = assemble_I3(sym, b, s3);
    const auto a2 = assemble_I3(swapped, b, s3);
    for (int k = 0; k < 2; ++k) CHECK(a1[k] == Approx(a2[k]).margin(1e-14));
}

TEST_CASE("triple assembly matches the product identity for large truncation") {
    // For the symmetric combination, with all components equal to one channel,
    // I111(r,r,r)*2 + I01(r) equals int (int B dW)^2 dW in closed form.
    const auto c3 = UnitStepCoefficients::from(CoeffTensor::build(3, 2));
    const auto s = unit_spectrum(1);
    ImageArray img(1, 1, 3);
    img.at(1, 1, 1)[0] = 1.0;
    RandomStream rs(13, 0);
    BundleRequest req;
    req.M = 1;
    req.q = 1;
    req.q1 = 2;
    for (int n = 0; n < 100; ++n) {
        const auto d = draw_basis(rs, 1, 2);
        const double h = 0.7;
        const auto b = build_bundle(d, req, c3, h);
        const double w = std::sqrt(h) * d(1, 0);
        const double expected = 2.0 * hermite_closed_form(3, w, h) + approx_I01(d, 1, h);
        CHECK(assemble_I3(img, b, s)[0] == Approx(expected).margin(1e-13));
    }
}

TEST_CASE("J assemblies do not depend on pairwise truncations") {
    RandomStream rs(14, 0);
    const auto s = truncate_spectrum(QWienerSpec::power_law(1.0, 2.0), 3);
    ImageArray img(4, 3, 1);
    for (double& v : img.data()) v = rs.normal();
    const auto d = draw_basis(rs, 3, 12);
    // The J family reads only zeta_0 and zeta_1.
    auto clipped = GaussianBasisDraws::zeros(3, 1);
    for (int r = 1; r <= 3; ++r)
        for (int j = 0; j <= 1; ++j) clipped(r, j) = d(r, j);
    for (auto f : {assemble_J1, assemble_J2, assemble_J3, assemble_J4}) CHECK(f(img, d, s, 0.2) == f(img, clipped, s, 0.2));
}

TEST_CASE("J1 second moment follows the isometry", "[statistical]") {
    const auto spec = QWienerSpec::power_law(1.0, 2.0);
    const auto s = truncate_spectrum(spec, 3);
    ImageArray e(3, 3, 1);
    for (int r = 1; r <= 3; ++r) e.at(r)[static_cast<std::size_t>(r - 1)] = 1.0;
    RandomStream rs(15, 0);
    const int N = 10000;
    const double h = 0.2;
    double acc = 0.0;
    for (int n = 0; n < N; ++n) acc += norm2(assemble_J1(e, draw_basis(rs, 3, 0), s, h));
    CHECK(acc / N == Approx(h * (1.0 + 0.25 + 1.0 / 9.0)).epsilon(0.05));
}

TEST_CASE("I1 truncation error matches channel-wise residuals", "[statistical]") {
    const auto s = unit_spectrum(2);
    ImageArray img(4, 2, 2);
    int k = 0;
    for (int r1 = 1; r1 <= 2; ++r1)
        for (int r2 = 1; r2 <= 2; ++r2) img.at(r1, r2)[static_cast<std::size_t>(k++)] = 1.0;
    RandomStream rs(16, 0);
    const int N = 10000, q = 2, q_ref = 200;
    const double h = 0.5;
    BundleRequest lo, hi;
    lo.M = hi.M = 2;
    lo.triples = hi.triples = false;
    lo.q = q;
    hi.q = q_ref;
    double acc = 0.0;
    for (int n = 0; n < N; ++n) {
        const auto d = draw_basis(rs, 2, q_ref);
        const auto a = assemble_I1(img, build_bundle(d, lo, {}, h), s);
        const auto b = assemble_I1(img, build_bundle(d, hi, {}, h), s);
        for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    // Off-diagonal channels carry the pairwise residual; the diagonal ones are exact.
    const double expect = 2.0 * (pairwise_residual(q, h) - pairwise_residual(q_ref, h));
    CHECK(acc / N == Approx(expect).epsilon(0.10));
}
