#pragma once

#include "flspde/legendre.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flspde {

/// Lazily computes reference-cube Fourier-Legendre coefficients of the
/// simplex kernel (constant weights), caching Legendre polynomials and the
/// nested antiderivatives shared between entries.
class CoefficientGenerator {
public:
    explicit CoefficientGenerator(int degree_cap = kDefaultLegendreDegreeCap);

    /// int_{-1}^{1} P_{j2}(y) int_{-1}^{y} P_{j1}(x) dx dy
    Rational cbar_double(int j2, int j1);
    /// int_{-1}^{1} P_{j3}(z) int_{-1}^{z} P_{j2}(y) int_{-1}^{y} P_{j1}(x) dx dy dz
    Rational cbar_triple(int j3, int j2, int j1);

    int degree_cap() const { return degree_cap_; }

private:
    const PolyRational& legendre(int n);
    const PolyRational& inner(int j1);
    const PolyRational& middle(int j2, int j1);

    int degree_cap_;
    std::vector<PolyRational> legendre_;
    std::vector<PolyRational> inner_;
    std::map<std::pair<int, int>, PolyRational> middle_;
};

Rational cbar_double(int j2, int j1);
Rational cbar_triple(int j3, int j2, int j1);

/// Dense tensor of exact coefficients \bar C_{j_k ... j_1} on [-1,1]^k,
/// k in {2, 3}. Storage is lexicographic with j_k outermost, the same order
/// as the cache file.
class CoeffTensor {
public:
    CoeffTensor(int order, int max_index, std::vector<Rational> entries);

    static CoeffTensor build(int order, int max_index);

    int order() const { return order_; }
    int max_index() const { return max_index_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Rational>& entries() const { return entries_; }

    const Rational& at(int j2, int j1) const;
    const Rational& at(int j3, int j2, int j1) const;
    /// Indices ordered (j_k, ..., j_1).
    const Rational& at(std::span<const int> outer_first) const;

    bool operator==(const CoeffTensor& rhs) const;

private:
    std::size_t flat(std::span<const int> outer_first) const;

    int order_;
    int max_index_;
    std::vector<Rational> entries_;
};

/// Scaled coefficient C_{j_k...j_1} on an interval of length `step`:
/// sqrt(prod(2 j_l + 1)) * step^{k/2} / 2^k * cbar.
double scale_coeff(const Rational& cbar, std::span<const int> indices, double step);

/// Floating-point coefficients at unit step (step^{k/2} factored out),
/// consumed by the integral approximations.
struct UnitStepCoefficients {
    int order = 0;
    int max_index = -1;
    std::vector<double> values;

    static UnitStepCoefficients from(const CoeffTensor& tensor);

    double at(int j3, int j2, int j1) const {
        const std::size_t n = static_cast<std::size_t>(max_index + 1);
        return values[(static_cast<std::size_t>(j3) * n + static_cast<std::size_t>(j2)) * n +
                      static_cast<std::size_t>(j1)];
    }
    double at(int j2, int j1) const {
        return values[static_cast<std::size_t>(j2) * static_cast<std::size_t>(max_index + 1) +
                      static_cast<std::size_t>(j1)];
    }
};

// Truncation residuals -------------------------------------------------------

/// Exact unit-step pairwise defect 1/2 * (1/2 - sum_{i=1}^q 1/(4i^2-1)).
/// The sum telescopes, so this is evaluated as 1 / (4 (2q + 1)).
Rational pairwise_defect(long q);

/// Mean-square error of the pairwise-distinct double integral approximation
/// after q terms: step^2 * pairwise_defect(q).
double pairwise_residual(long q, double step);

/// Exact unit-step triple defect 1/6 - sum_{j <= q1} Chat^2.
Rational triple_defect(int q1, const CoeffTensor& tensor);

/// step^3 * triple_defect(q1). Throws if the tensor is not order 3 or does
/// not cover q1.
double triple_residual(int q1, double step, const CoeffTensor& tensor);

/// I_k - sum_{j <= q} C^2 with I_2 = step^2/2, I_3 = step^3/6.
double parseval_gap(int k, int q, double step, const CoeffTensor& tensor);

struct ResidualReport {
    int k = 0;
    int q = 0;
    double step = 0.0;
    double residual = 0.0;
    double parseval_gap = 0.0;
};

ResidualReport residual_report(int k, int q, double step, const CoeffTensor& tensor);

enum class ResidualKind { Pairwise, Triple };

struct MinimalQOptions {
    long cap = 1'000'000;
    int degree_cap = kDefaultLegendreDegreeCap;
    /// Relative distance to the criterion below which a result is flagged.
    double boundary_margin = 0.01;
};

struct MinimalQResult {
    long q = 0;
    double criterion = 0.0;             ///< step^4
    std::optional<double> residual_below; ///< at q-1, absent when q == 0
    double residual_at = 0.0;
    double residual_above = 0.0;
    bool boundary = false;
};

class SearchCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest q with residual(q, step) <= step^4, compared in exact arithmetic
/// against the binary value of `step`. Requires step in (0, 1].
MinimalQResult minimal_q(double step, ResidualKind kind, const MinimalQOptions& options = {});

// Cache file ----------------------------------------------------------------

enum class CacheErrorKind {
    Io,
    MalformedHeader,
    DeclaredOrder,
    MalformedEntry,
    TruncatedEntries,
    ChecksumMismatch,
};

class CacheError : public std::runtime_error {
public:
    CacheError(CacheErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    CacheErrorKind kind() const { return kind_; }

private:
    CacheErrorKind kind_;
};

const char* to_string(CacheErrorKind kind);

/// Text serialisation:
///   FLC 1 k=<k> q=<q>
///   <j_k> ... <j_1> <num>/<den>     (lexicographic, zeros included)
///   END <entry-count>
std::string serialize_cache(const CoeffTensor& tensor);
CoeffTensor parse_cache(const std::string& text, std::optional<int> expected_order = std::nullopt);

void save_cache(const CoeffTensor& tensor, const std::filesystem::path& path);
CoeffTensor load_cache(const std::filesystem::path& path, std::optional<int> expected_order = std::nullopt);

/// FNV-1a 64 of the serialised form, as 16 hex digits.
std::string tensor_checksum(const CoeffTensor& tensor);
std::string text_checksum(const std::string& text);

} // namespace flspde
