#include "flspde/galerkin_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace flspde {

HeatDiagnosticModel::HeatDiagnosticModel(const HeatModelOptions& options)
    : options_(options), spec_(QWienerSpec::power_law(options.spectrum_scale, options.spectrum_rho)) {
    if (options_.dim < 1) throw std::invalid_argument("heat model: dim must be >= 1");
    if (!(options_.nu > 0.0)) throw std::invalid_argument("heat model: nu must be positive");
    if (options_.max_noise_index < 1) throw std::invalid_argument("heat model: max_noise_index must be >= 1");
    const auto n = static_cast<std::size_t>(options_.dim);
    a_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = static_cast<double>(k + 1);
        a_[k] = -options_.nu * std::numbers::pi * std::numbers::pi * m * m;
    }
    std::mt19937_64 gen(options_.mixing_seed);
    std::uniform_real_distribution<double> self(0.5, 1.0), cross(-1.0, 1.0);
    const std::size_t total = n * static_cast<std::size_t>(options_.max_noise_index);
    t1_.resize(total);
    t2_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        t1_[i] = self(gen);
        t2_[i] = cross(gen);
    }
}

std::vector<double> HeatDiagnosticModel::initial_value() const {
    std::vector<double> xi(static_cast<std::size_t>(options_.dim));
    for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = 1.0 / static_cast<double>(k + 1);
    return xi;
}

void HeatDiagnosticModel::F(std::span<const double> y, std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = options_.kappa * std::sin(y[k]);
}

void HeatDiagnosticModel::dF(std::span<const double> y, std::span<const double> v, std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = options_.kappa * std::cos(y[k]) * v[k];
}

void HeatDiagnosticModel::d2F(std::span<const double> y, std::span<const double> u, std::span<const double> v,
                              std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -options_.kappa * std::sin(y[k]) * u[k] * v[k];
}

double HeatDiagnosticModel::b(double y, int derivative) const {
    if (options_.diffusion == DiffusionKind::Affine) {
        switch (derivative) {
        case 0: return 1.0 + 0.5 * y;
        case 1: return 0.5;
        default: return 0.0;
        }
    }
    switch (derivative) {
    case 0: return 1.0 + 0.5 * std::sin(y);
    case 1: return 0.5 * std::cos(y);
    default: return -0.5 * std::sin(y);
    }
}

void HeatDiagnosticModel::check_r(int r) const {
    if (r < 1 || r > options_.max_noise_index) {
        throw std::out_of_range("heat model: noise index " + std::to_string(r) + " outside 1.." +
                                std::to_string(options_.max_noise_index));
    }
}

// The three B evaluators share one stencil: each output coordinate k reads
// coordinates k and (k + r) mod N, or only k = r-1 in the diagonal variant.
void HeatDiagnosticModel::B(std::span<const double> y, int r, std::span<double> out) const {
    check_r(r);
    std::fill(out.begin(), out.end(), 0.0);
    const int n = options_.dim;
    const double s = options_.sigma / r;
    if (options_.noise == NoiseKind::Off) return;
    if (options_.noise == NoiseKind::Diagonal) {
        if (r <= n) out[static_cast<std::size_t>(r - 1)] = s * b(y[static_cast<std::size_t>(r - 1)], 0);
        return;
    }
    const std::size_t base = static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(n);
    for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const auto l = static_cast<std::size_t>((k + r) % n);
        out[uk] = s * (t1_[base + uk] * b(y[uk], 0) + t2_[base + uk] * b(y[l], 0));
    }
}

void HeatDiagnosticModel::dB(std::span<const double> y, std::span<const double> u, int r,
                             std::span<double> out) const {
    check_r(r);
    std::fill(out.begin(), out.end(), 0.0);
    const int n = options_.dim;
    const double s = options_.sigma / r;
    if (options_.noise == NoiseKind::Off) return;
    if (options_.noise == NoiseKind::Diagonal) {
        if (r <= n) {
            const auto k = static_cast<std::size_t>(r - 1);
            out[k] = s * b(y[k], 1) * u[k];
        }
        return;
    }
    const std::size_t base = static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(n);
    for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const auto l = static_cast<std::size_t>((k + r) % n);
        out[uk] = s * (t1_[base + uk] * b(y[uk], 1) * u[uk] + t2_[base + uk] * b(y[l], 1) * u[l]);
    }
}

void HeatDiagnosticModel::d2B(std::span<const double> y, std::span<const double> u, std::span<const double> v, int r,
                              std::span<double> out) const {
    check_r(r);
    std::fill(out.begin(), out.end(), 0.0);
    const int n = options_.dim;
    const double s = options_.sigma / r;
    if (options_.noise == NoiseKind::Off) return;
    if (options_.noise == NoiseKind::Diagonal) {
        if (r <= n) {
            const auto k = static_cast<std::size_t>(r - 1);
            out[k] = s * b(y[k], 2) * u[k] * v[k];
        }
        return;
    }
    const std::size_t base = static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(n);
    for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const auto l = static_cast<std::size_t>((k + r) % n);
        out[uk] = s * (t1_[base + uk] * b(y[uk], 2) * u[uk] * v[uk] + t2_[base + uk] * b(y[l], 2) * u[l] * v[l]);
    }
}

std::string HeatDiagnosticModel::id() const {
    std::ostringstream os;
    os.precision(17);
    os << "heat(dim=" << options_.dim << ",nu=" << options_.nu << ",kappa=" << options_.kappa
       << ",sigma=" << options_.sigma << ",noise="
       << (options_.noise == NoiseKind::NonCommutative ? "noncommutative"
           : options_.noise == NoiseKind::Diagonal    ? "diagonal"
                                                      : "off")
       << ",b=" << (options_.diffusion == DiffusionKind::Sine ? "sine" : "affine") << ",q=" << spec_.describe()
       << ")";
    return os.str();
}

} // namespace flspde
