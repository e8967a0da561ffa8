#pragma once

#include "flspde/coeff_tensor.hpp"
#include "flspde/random_stream.hpp"

#include <functional>
#include <span>
#include <vector>

namespace flspde {

/// zeta_j^{(r)} for components r = 1..m and basis indices j = 0..q_max.
struct GaussianBasisDraws {
    int m = 0;
    int q_max = -1;
    std::vector<double> values; ///< row r-1 holds zeta_0^{(r)} .. zeta_{q_max}^{(r)}

    static GaussianBasisDraws zeros(int m, int q_max);

    double operator()(int r, int j) const { return values[index(r, j)]; }
    double& operator()(int r, int j) { return values[index(r, j)]; }
    std::span<const double> row(int r) const {
        return {values.data() + index(r, 0), static_cast<std::size_t>(q_max + 1)};
    }

private:
    std::size_t index(int r, int j) const {
        return static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(q_max + 1) + static_cast<std::size_t>(j);
    }
};

/// Fills an m x (q_max+1) matrix from the stream, component-major.
GaussianBasisDraws draw_basis(RandomStream& stream, int m, int q_max);

double approx_I1(const GaussianBasisDraws& d, int r, double step);
double approx_I01(const GaussianBasisDraws& d, int r, double step);
double approx_I10(const GaussianBasisDraws& d, int r, double step);
double approx_I11(const GaussianBasisDraws& d, int r1, int r2, int q, double step);
double approx_I111(const GaussianBasisDraws& d, int r1, int r2, int r3, int q1, const UnitStepCoefficients& c3,
                   double step);

/// All single, double and triple integral approximations over J_M for one step.
struct ItoIntegralBundle {
    double step = 0.0;
    int M = 0;
    int q = 0;
    int q1 = 0;
    std::vector<double> I1, I01, I10; ///< size M
    std::vector<double> I11;          ///< M*M, (r1, r2) row-major
    std::vector<double> I111;         ///< M^3, (r1, r2, r3) row-major

    double i1(int r) const { return I1[static_cast<std::size_t>(r - 1)]; }
    double i01(int r) const { return I01[static_cast<std::size_t>(r - 1)]; }
    double i10(int r) const { return I10[static_cast<std::size_t>(r - 1)]; }
    double i11(int r1, int r2) const {
        return I11[static_cast<std::size_t>(r1 - 1) * static_cast<std::size_t>(M) + static_cast<std::size_t>(r2 - 1)];
    }
    double i111(int r1, int r2, int r3) const {
        const auto m = static_cast<std::size_t>(M);
        return I111[(static_cast<std::size_t>(r1 - 1) * m + static_cast<std::size_t>(r2 - 1)) * m +
                    static_cast<std::size_t>(r3 - 1)];
    }
    bool has_triples() const { return !I111.empty(); }
};

inline constexpr int kDefaultBundleMaxM = 64;

struct BundleRequest {
    int M = 1;
    int q = 0;
    int q1 = 0;
    bool triples = true;
    int max_M = kDefaultBundleMaxM;
};

/// `c3` is only read when triples are requested.
ItoIntegralBundle build_bundle(const GaussianBasisDraws& d, const BundleRequest& req, const UnitStepCoefficients& c3,
                               double step);

// General multiplicity ------------------------------------------------------

struct PairPartition {
    std::vector<std::pair<int, int>> pairs; ///< positions in 1..k, first < second
    std::vector<int> singles;               ///< ascending
};

/// Every way of choosing r disjoint unordered pairs from {1..k}.
std::vector<PairPartition> enumerate_pair_partitions(int k, int r);

/// C_{j_k...j_1} for the interval, given j = (j_1, ..., j_k).
using CoeffAccessor = std::function<double(std::span<const int>)>;

/// Scaled accessor over a tensor for an interval of length `step`.
CoeffAccessor tensor_accessor(const CoeffTensor& tensor, double step);

/// Prelimit partition expansion of J^{(i_1...i_k)} with truncations p_l.
/// Index 0 denotes the time component, whose basis values are
/// int_t^T phi_j ds = sqrt(step) [j == 0].
double approx_general_k(const GaussianBasisDraws& d, std::span<const int> i, std::span<const int> p,
                        const CoeffAccessor& coeff, double step);

/// Equal-index integral of multiplicity k <= 5 as a polynomial in the
/// increment delta and step Delta: H_k(delta, Delta) / k!, where
/// H_{n+1} = delta H_n - n Delta H_{n-1}.
double hermite_closed_form(int k, double delta, double Delta);

} // namespace flspde
