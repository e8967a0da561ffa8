#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <vector>

namespace flspde {

using Rational = mpq_class;

/// Canonical n/d.
inline Rational frac(long n, long d) {
    Rational r{mpz_class(n), mpz_class(d)};
    r.canonicalize();
    return r;
}

/// Polynomial with exact rational coefficients in the monomial basis,
/// degree-ascending. The zero polynomial is stored as a single zero
/// coefficient, so degree() == coefficients().size() - 1 always holds.
class PolyRational {
public:
    PolyRational();
    explicit PolyRational(std::vector<Rational> coefficients);

    static PolyRational constant(const Rational& c);
    /// The identity polynomial x.
    static PolyRational identity();

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const;
    const std::vector<Rational>& coefficients() const { return coeffs_; }
    const Rational& operator[](std::size_t i) const { return coeffs_[i]; }

    Rational operator()(const Rational& x) const;
    double operator()(double x) const;

    PolyRational operator+(const PolyRational& rhs) const;
    PolyRational operator-(const PolyRational& rhs) const;
    PolyRational operator*(const PolyRational& rhs) const;
    PolyRational operator*(const Rational& s) const;

    /// Antiderivative normalised to vanish at x = -1, i.e. x -> int_{-1}^x p.
    PolyRational integral_from_minus_one() const;
    /// int_{-1}^{1} p(x) dx
    Rational integral_over_reference() const;

    bool operator==(const PolyRational& rhs) const { return coeffs_ == rhs.coeffs_; }

private:
    void normalize();
    std::vector<Rational> coeffs_;
};

inline constexpr int kDefaultLegendreDegreeCap = 64;

/// P_n(x) by the three-term recurrence.
double legendre_eval(int n, double x);

/// Exact monomial coefficients of P_n. Throws std::invalid_argument for
/// n < 0 or n > degree_cap.
PolyRational legendre_poly(int n, int degree_cap = kDefaultLegendreDegreeCap);

/// Affine map of [t, T] onto the reference interval [-1, 1], fixed once per step.
class IntervalScaling {
public:
    IntervalScaling(double t, double T);

    double start() const { return t_; }
    double end() const { return T_; }
    double step() const { return step_; }
    double to_reference(double s) const { return (s - center_) * scale_; }

private:
    double t_;
    double T_;
    double step_;
    double center_;
    double scale_;
};

/// Shifted orthonormal Legendre function phi_j on [t, T].
double phi_eval(int j, double s, const IntervalScaling& scaling);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= 2n-1.
GaussRule gauss_legendre(int n);

} // namespace flspde
