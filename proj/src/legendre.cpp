#include "flspde/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace flspde {

PolyRational::PolyRational() : coeffs_{Rational(0)} {}

PolyRational::PolyRational(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
    normalize();
}

PolyRational PolyRational::constant(const Rational& c) { return PolyRational({c}); }

PolyRational PolyRational::identity() { return PolyRational({Rational(0), Rational(1)}); }

void PolyRational::normalize() {
    for (auto& c : coeffs_) {
        c.canonicalize();
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0) {
        coeffs_.pop_back();
    }
    if (coeffs_.empty()) {
        coeffs_.emplace_back(0);
    }
}

bool PolyRational::is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0; }

Rational PolyRational::operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

double PolyRational::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * x + it->get_d();
    }
    return acc;
}

PolyRational PolyRational::operator+(const PolyRational& rhs) const {
    std::vector<Rational> out(std::max(coeffs_.size(), rhs.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) out[i] += rhs.coeffs_[i];
    return PolyRational(std::move(out));
}

PolyRational PolyRational::operator-(const PolyRational& rhs) const {
    std::vector<Rational> out(std::max(coeffs_.size(), rhs.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) out[i] -= rhs.coeffs_[i];
    return PolyRational(std::move(out));
}

PolyRational PolyRational::operator*(const PolyRational& rhs) const {
    if (is_zero() || rhs.is_zero()) return PolyRational();
    std::vector<Rational> out(coeffs_.size() + rhs.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) {
            out[i + j] += coeffs_[i] * rhs.coeffs_[j];
        }
    }
    return PolyRational(std::move(out));
}

PolyRational PolyRational::operator*(const Rational& s) const {
    std::vector<Rational> out(coeffs_);
    for (auto& c : out) c *= s;
    return PolyRational(std::move(out));
}

PolyRational PolyRational::integral_from_minus_one() const {
    std::vector<Rational> out(coeffs_.size() + 1, Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        out[i + 1] = coeffs_[i] / frac(static_cast<long>(i + 1), 1);
    }
    // Subtract the value at -1: sum_i c_{i+1} (-1)^{i+1}.
    Rational at_minus_one = 0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (i % 2 == 1) at_minus_one -= out[i];
        else at_minus_one += out[i];
    }
    out[0] = -at_minus_one;
    return PolyRational(std::move(out));
}

Rational PolyRational::integral_over_reference() const {
    // Odd powers integrate to zero on [-1, 1]; x^{2m} contributes 2/(2m+1).
    Rational acc = 0;
    for (std::size_t i = 0; i < coeffs_.size(); i += 2) {
        acc += coeffs_[i] * frac(2, static_cast<long>(i + 1));
    }
    acc.canonicalize();
    return acc;
}

double legendre_eval(int n, double x) {
    if (n < 0) throw std::invalid_argument("legendre_eval: negative degree");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

PolyRational legendre_poly(int n, int degree_cap) {
    if (n < 0) throw std::invalid_argument("legendre_poly: negative degree");
    if (n > degree_cap) {
        throw std::invalid_argument("legendre_poly: degree " + std::to_string(n) +
                                    " exceeds cap " + std::to_string(degree_cap));
    }
    PolyRational prev = PolyRational::constant(1);
    if (n == 0) return prev;
    PolyRational cur = PolyRational::identity();
    const PolyRational x = PolyRational::identity();
    for (int k = 1; k < n; ++k) {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        PolyRational next = (x * cur) * frac(2 * k + 1, k + 1) - prev * frac(k, k + 1);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

IntervalScaling::IntervalScaling(double t, double T)
    : t_(t), T_(T), step_(T - t), center_(0.5 * (T + t)), scale_(2.0 / (T - t)) {
    if (!(T > t)) throw std::invalid_argument("IntervalScaling: requires T > t");
}

double phi_eval(int j, double s, const IntervalScaling& scaling) {
    return std::sqrt((2.0 * j + 1.0) / scaling.step()) * legendre_eval(j, scaling.to_reference(s));
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-type initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 1; k < n; ++k) {
            const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        if (n == 1) dp = 1.0;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace flspde
