#pragma once

#include "flspde/galerkin_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flspde {

enum class Scheme { Milstein, WagnerPlaten };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/// Term groups of the Wagner-Platen step; Milstein uses Drift, J1 and I1.
enum TermGroup : unsigned {
    kTermDrift = 1u << 0,       ///< Delta F
    kTermDriftTaylor = 1u << 1, ///< Delta^2/2 F'(AY + F)
    kTermTrace = 1u << 2,       ///< Delta^2/4 sum lambda F''(Be, Be)
    kTermJ1 = 1u << 3,
    kTermI1 = 1u << 4,
    kTermJ2 = 1u << 5,
    kTermJ3 = 1u << 6,
    kTermI3 = 1u << 7, ///< enters with weight 1/2
    kTermJ4 = 1u << 8,
    kTermI2 = 1u << 9,
};
using TermMask = unsigned;
inline constexpr TermMask kAllTerms = (1u << 10) - 1;
inline constexpr int kTermGroupCount = 10;
const char* term_group_name(TermGroup g);

struct Semigroup {
    std::vector<double> full; ///< exp(a_k Delta)
    std::vector<double> half; ///< exp(a_k Delta / 2)

    static Semigroup make(std::span<const double> a, double step);
};

struct StepContext {
    double step = 0.0;
    Semigroup semigroup;
    TruncationParams trunc;
    TruncatedSpectrum spectrum;
    const GaussianBasisDraws* draws = nullptr;
    const ItoIntegralBundle* bundle = nullptr;
    TermMask mask = kAllTerms;
};

/// B(y)e_r for r = 1..M.
ImageArray noise_images(const GalerkinModel& model, std::span<const double> y, int M);
/// B'(y)(B(y)e_r1)e_r2 for r1, r2 = 1..M.
ImageArray milstein_images(const GalerkinModel& model, std::span<const double> y, const ImageArray& be);

/// Highest basis index a scheme reads from the draws.
int required_basis_index(Scheme s, const TruncationParams& t);

std::vector<double> milstein_step(const GalerkinModel& model, std::span<const double> y, const StepContext& ctx);
std::vector<double> wagner_platen_step(const GalerkinModel& model, std::span<const double> y, const StepContext& ctx);

/// Draws for step p (0-based) of a path.
using DrawSource = std::function<GaussianBasisDraws(int p)>;

/// Shared, immutable per-run data for repeated stepping.
class Stepper {
public:
    Stepper(const GalerkinModel& model, Scheme scheme, const TruncationParams& trunc, double step,
            TermMask mask = kAllTerms);

    std::vector<double> step(std::span<const double> y, const GaussianBasisDraws& draws) const;
    /// Runs n_steps from y0, calling `observe(p, state)` after each step if set.
    std::vector<double> run(std::span<const double> y0, int n_steps, const DrawSource& draws,
                            const std::function<void(int, std::span<const double>)>& observe = {}) const;

    int basis_index() const { return Q_; }
    const TruncationParams& trunc() const { return trunc_; }

private:
    const GalerkinModel& model_;
    Scheme scheme_;
    TruncationParams trunc_;
    double step_;
    TermMask mask_;
    int Q_;
    Semigroup semigroup_;
    TruncatedSpectrum spectrum_;
    UnitStepCoefficients c3_;
};

struct SimulationConfig {
    Scheme scheme = Scheme::Milstein;
    TruncationParams trunc;
    double step = 0.01;
    int n_steps = 1;
    std::uint64_t seed = 1;
    std::uint64_t path_id = 0;
    bool record = true;
    TermMask mask = kAllTerms;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states; ///< states[p] at times[p]; p = 0 is the initial value
};

/// Per-step draws come from RandomStream(seed, path_id), one draw_basis call per step.
Trajectory simulate_path(const GalerkinModel& model, const SimulationConfig& cfg);

/// Expresses Legendre coefficients of a Brownian path over one coarse step
/// of length n h through the coefficients over its n substeps of length h:
///   zeta_l^coarse = sum_s sum_{j <= l} c(l, s, j) zeta_j^{fine, s}.
/// The map is exact and orthogonal, so coarse draws are again i.i.d. N(0,1).
class RefinementMap {
public:
    RefinementMap(int n, int Q);

    int n() const { return n_; }
    int Q() const { return Q_; }
    double coeff(int l, int s, int j) const {
        return c_[(static_cast<std::size_t>(l) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(s)) *
                      static_cast<std::size_t>(Q_ + 1) +
                  static_cast<std::size_t>(j)];
    }
    /// `fine` holds n consecutive substep draws with q_max >= Q.
    GaussianBasisDraws aggregate(std::span<const GaussianBasisDraws> fine, int m) const;

private:
    int n_;
    int Q_;
    std::vector<double> c_;
};

class InsufficientPaths : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kMinStrongErrorPaths = 100;

struct StrongErrorConfig {
    Scheme scheme = Scheme::Milstein;
    TruncationParams trunc;
    /// Truncation of the reference run; defaults to `trunc`.
    std::optional<TruncationParams> ref_trunc;
    std::vector<double> steps;
    double ref_step = 0.0;
    double horizon = 1.0;
    int paths = 400;
    std::uint64_t seed = 1;
    TermMask mask = kAllTerms;
};

struct StrongErrorRow {
    double step = 0.0;
    int n_steps = 0;
    double rms = 0.0;
    double rms_stderr = 0.0;
};

struct StrongErrorResult {
    std::vector<StrongErrorRow> rows;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// RMS endpoint error of the scheme at each step against the same scheme at
/// ref_step, every path driven by one fine Brownian description.
StrongErrorResult strong_error_estimate(const GalerkinModel& model, const StrongErrorConfig& cfg);

struct TailStudyConfig {
    std::vector<int> Ms{2, 4, 8, 16};
    int ref_factor = 4;
    int q = 10;
    double step = 0.1;
    int paths = 10000;
    std::uint64_t seed = 1;
};

struct TailStudyRow {
    int M = 0;
    double lambda_next = 0.0; ///< lambda_{M+1}
    double ms_J1 = 0.0;       ///< mean of |J1^M - J1^{ref M}|^2
    double ms_I1 = 0.0;
    double se_J1 = 0.0;
    double se_I1 = 0.0;
};

/// Mean-square differences between J1, I1 assembled over J_M and over
/// J_{ref_factor M} at the state y, both from the same draws.
std::vector<TailStudyRow> truncation_tail_study(const GalerkinModel& model, std::span<const double> y,
                                                const TailStudyConfig& cfg);

} // namespace flspde
