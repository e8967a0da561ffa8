#pragma once

#include "flspde/ito_integrals.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flspde {

enum class SpectrumLaw { PowerLaw, Geometric, Explicit };

/// Eigenvalues lambda_i, i = 1, 2, ..., of the covariance operator Q.
class QWienerSpec {
public:
    /// lambda_i = c i^{-rho}, rho > 1.
    static QWienerSpec power_law(double c, double rho);
    /// lambda_i = c ratio^i, 0 < ratio < 1.
    static QWienerSpec geometric(double c, double ratio);
    /// Finite index set J = {1..n}; values must be positive and non-increasing.
    static QWienerSpec explicit_list(std::vector<double> values);

    SpectrumLaw law() const { return law_; }
    double eigenvalue(int i) const;
    /// Number of eigenvalues, or -1 for an infinite index set.
    int size() const;
    double trace() const;
    std::string describe() const;

private:
    SpectrumLaw law_ = SpectrumLaw::PowerLaw;
    double c_ = 1.0;
    double p_ = 2.0; ///< rho or ratio
    std::vector<double> values_;
};

struct TruncationParams {
    int M = 1;
    int q = 0;
    int q1 = 0;
    double alpha = 0.5;

    void validate() const;
};

struct TruncatedSpectrum {
    std::vector<double> eigenvalues; ///< lambda_1 .. lambda_M
    std::vector<double> sqrt_eigenvalues;
    double tail_sup = 0.0; ///< sup of lambda_i over i > M
    int M() const { return static_cast<int>(eigenvalues.size()); }
};

TruncatedSpectrum truncate_spectrum(const QWienerSpec& spec, int M);

/// Coordinate vectors of length `dim` indexed by 1..M tuples of length `rank`.
class ImageArray {
public:
    ImageArray() = default;
    ImageArray(int dim, int M, int rank);

    int dim() const { return dim_; }
    int M() const { return M_; }
    int rank() const { return rank_; }

    std::span<double> at(int r);
    std::span<double> at(int r1, int r2);
    std::span<double> at(int r1, int r2, int r3);
    std::span<const double> at(int r) const;
    std::span<const double> at(int r1, int r2) const;
    std::span<const double> at(int r1, int r2, int r3) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t offset(std::initializer_list<int> r) const;

    int dim_ = 0;
    int M_ = 0;
    int rank_ = 0;
    std::vector<double> data_;
};

/// sum_r img(r) sqrt(lambda_r) sqrt(step) zeta_0^{(r)}
std::vector<double> assemble_J1(const ImageArray& Be, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step);
/// -step^{3/2}/(2 sqrt 3) sum_r img(r) sqrt(lambda_r) zeta_1^{(r)}, img = A B e_r
std::vector<double> assemble_J2(const ImageArray& ABe, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step);
/// step^{3/2}/2 sum_r img(r) sqrt(lambda_r) (zeta_0 + zeta_1/sqrt 3), img = B'(AZ+F) e_r
std::vector<double> assemble_J3(const ImageArray& img, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step);
/// step^{3/2}/2 sum_r img(r) sqrt(lambda_r) (zeta_0 - zeta_1/sqrt 3), img = F' B e_r
std::vector<double> assemble_J4(const ImageArray& img, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step);

/// sum_{r1,r2} img(r1,r2) sqrt(lambda_r1 lambda_r2) I11(r1,r2), img = B'(B e_r1) e_r2
std::vector<double> assemble_I1(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s);
/// sum img(r1,r2,r3) sqrt(lambda lambda lambda) I111(r1,r2,r3), img = B'(B'(B e_r1) e_r2) e_r3
std::vector<double> assemble_I2(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s);
/// sum img(r1,r2,r3) sqrt(...) (I111(r1,r2,r3) + I111(r2,r1,r3) + [r1==r2] I01(r3)),
/// img = B''(B e_r1, B e_r2) e_r3
std::vector<double> assemble_I3(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s);

struct OperatorBundle {
    std::vector<double> J1, J2, J3, J4, I1, I2, I3;
    int M = 0;
    int q = 0;
    int q1 = 0;
    double step = 0.0;
    std::uint64_t seed = 0;
};

/// L_k (k!)^2 (tr Q)^k * gap.
double theorem3_bound(double L_k, double trace_Q, int k, double parseval_gap);

/// (sup_{i > M} lambda_i)^{2 alpha}.
double theorem4_tail(const QWienerSpec& spec, int M, double alpha);

} // namespace flspde
