#pragma once

#include "flspde/qwiener.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flspde {

/// Finite spectral-Galerkin representation of a semilinear SPDE with a
/// diagonal linear part. Evaluators write into `out` (length dim()) and
/// must be pure functions of their arguments. Noise indices r are 1-based.
class GalerkinModel {
public:
    virtual ~GalerkinModel() = default;

    virtual int dim() const = 0;
    virtual std::span<const double> a_spectrum() const = 0;
    virtual const QWienerSpec& qspec() const = 0;
    virtual std::vector<double> initial_value() const = 0;

    virtual void F(std::span<const double> y, std::span<double> out) const = 0;
    virtual void dF(std::span<const double> y, std::span<const double> v, std::span<double> out) const = 0;
    virtual void d2F(std::span<const double> y, std::span<const double> u, std::span<const double> v,
                     std::span<double> out) const = 0;

    virtual void B(std::span<const double> y, int r, std::span<double> out) const = 0;
    virtual void dB(std::span<const double> y, std::span<const double> u, int r, std::span<double> out) const = 0;
    virtual void d2B(std::span<const double> y, std::span<const double> u, std::span<const double> v, int r,
                     std::span<double> out) const = 0;

    /// True when B(y)e_r is supported on coordinate r-1 and depends on y
    /// only through that coordinate. Mixed-index images then vanish and
    /// the steppers skip them.
    virtual bool diagonal_noise() const { return false; }
    /// True when B is identically zero.
    virtual bool noise_free() const { return false; }

    virtual std::string id() const = 0;
};

enum class NoiseKind { NonCommutative, Diagonal, Off };
enum class DiffusionKind { Sine, Affine };

struct HeatModelOptions {
    int dim = 16;
    double nu = 0.02;
    double kappa = 1.0;  ///< F(y)_k = kappa sin(y_k)
    double sigma = 1.0;  ///< noise amplitude
    NoiseKind noise = NoiseKind::NonCommutative;
    DiffusionKind diffusion = DiffusionKind::Sine;
    double spectrum_scale = 1.0;
    double spectrum_rho = 2.0;
    std::uint64_t mixing_seed = 0x5eed'0f'4d1c'0001ULL;
    int max_noise_index = kDefaultBundleMaxM;
};

/// One-dimensional stochastic heat equation in sine-mode coordinates:
/// a_k = -nu pi^2 k^2, xi_k = 1/k, F(y)_k = kappa sin(y_k), and
///   noncommutative: (B(y)e_r)_k = sigma/r (T1[r,k] b(y_k) + T2[r,k] b(y_{(k+r) mod N}))
///   diagonal:       (B(y)e_r)_k = [k == r-1] sigma/r b(y_k)
/// with b(y) = 1 + sin(y)/2 or 1 + y/2 and T1, T2 drawn once from a fixed seed.
class HeatDiagnosticModel final : public GalerkinModel {
public:
    explicit HeatDiagnosticModel(const HeatModelOptions& options = {});

    int dim() const override { return options_.dim; }
    std::span<const double> a_spectrum() const override { return a_; }
    const QWienerSpec& qspec() const override { return spec_; }
    std::vector<double> initial_value() const override;

    void F(std::span<const double> y, std::span<double> out) const override;
    void dF(std::span<const double> y, std::span<const double> v, std::span<double> out) const override;
    void d2F(std::span<const double> y, std::span<const double> u, std::span<const double> v,
             std::span<double> out) const override;

    void B(std::span<const double> y, int r, std::span<double> out) const override;
    void dB(std::span<const double> y, std::span<const double> u, int r, std::span<double> out) const override;
    void d2B(std::span<const double> y, std::span<const double> u, std::span<const double> v, int r,
             std::span<double> out) const override;

    bool diagonal_noise() const override { return options_.noise == NoiseKind::Diagonal; }
    bool noise_free() const override { return options_.noise == NoiseKind::Off; }

    std::string id() const override;
    const HeatModelOptions& options() const { return options_; }

private:
    double b(double y, int derivative) const;
    void check_r(int r) const;

    HeatModelOptions options_;
    QWienerSpec spec_;
    std::vector<double> a_;
    std::vector<double> t1_, t2_; ///< [(r-1) * dim + k]
};

} // namespace flspde
