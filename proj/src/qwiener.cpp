#include "flspde/qwiener.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flspde {

QWienerSpec QWienerSpec::power_law(double c, double rho) {
    if (!(c > 0.0)) throw std::invalid_argument("power law: scale must be positive");
    if (!(rho > 1.0)) throw std::invalid_argument("power law: exponent must exceed 1 for a finite trace");
    QWienerSpec s;
    s.law_ = SpectrumLaw::PowerLaw;
    s.c_ = c;
    s.p_ = rho;
    return s;
}

QWienerSpec QWienerSpec::geometric(double c, double ratio) {
    if (!(c > 0.0)) throw std::invalid_argument("geometric law: scale must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("geometric law: ratio must lie in (0, 1)");
    QWienerSpec s;
    s.law_ = SpectrumLaw::Geometric;
    s.c_ = c;
    s.p_ = ratio;
    return s;
}

QWienerSpec QWienerSpec::explicit_list(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("explicit spectrum: empty list");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::invalid_argument("explicit spectrum: eigenvalues must be positive");
        if (i > 0 && values[i] > values[i - 1]) {
            throw std::invalid_argument("explicit spectrum: eigenvalues must be non-increasing");
        }
    }
    QWienerSpec s;
    s.law_ = SpectrumLaw::Explicit;
    s.values_ = std::move(values);
    return s;
}

double QWienerSpec::eigenvalue(int i) const {
    if (i < 1) throw std::out_of_range("eigenvalue: index must be >= 1");
    switch (law_) {
    case SpectrumLaw::PowerLaw: return c_ * std::pow(static_cast<double>(i), -p_);
    case SpectrumLaw::Geometric: return c_ * std::pow(p_, i);
    case SpectrumLaw::Explicit:
        if (i > static_cast<int>(values_.size())) throw std::out_of_range("eigenvalue: index beyond explicit list");
        return values_[static_cast<std::size_t>(i - 1)];
    }
    return 0.0;
}

int QWienerSpec::size() const { return law_ == SpectrumLaw::Explicit ? static_cast<int>(values_.size()) : -1; }

double QWienerSpec::trace() const {
    switch (law_) {
    case SpectrumLaw::PowerLaw: return c_ * std::riemann_zeta(p_);
    case SpectrumLaw::Geometric: return c_ * p_ / (1.0 - p_);
    case SpectrumLaw::Explicit: {
        double t = 0.0;
        for (double v : values_) t += v;
        return t;
    }
    }
    return 0.0;
}

std::string QWienerSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (law_) {
    case SpectrumLaw::PowerLaw: os << "power:c=" << c_ << ",rho=" << p_; break;
    case SpectrumLaw::Geometric: os << "geometric:c=" << c_ << ",ratio=" << p_; break;
    case SpectrumLaw::Explicit:
        os << "explicit:";
        for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
        break;
    }
    return os.str();
}

void TruncationParams::validate() const {
    if (M < 1) throw std::invalid_argument("truncation: M must be >= 1");
    if (q < 0 || q1 < 0) throw std::invalid_argument("truncation: q and q1 must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("truncation: alpha must be positive");
}

TruncatedSpectrum truncate_spectrum(const QWienerSpec& spec, int M) {
    if (M < 1) throw std::invalid_argument("truncate_spectrum: M must be >= 1");
    const int n = spec.size();
    if (n >= 0 && M > n) {
        throw std::invalid_argument("truncate_spectrum: M=" + std::to_string(M) + " exceeds the " +
                                    std::to_string(n) + " listed eigenvalues");
    }
    TruncatedSpectrum t;
    t.eigenvalues.reserve(static_cast<std::size_t>(M));
    for (int i = 1; i <= M; ++i) {
        t.eigenvalues.push_back(spec.eigenvalue(i));
        t.sqrt_eigenvalues.push_back(std::sqrt(t.eigenvalues.back()));
    }
    // Every law is non-increasing, so the supremum of the remainder is its first term.
    t.tail_sup = (n >= 0 && M == n) ? 0.0 : spec.eigenvalue(M + 1);
    return t;
}

ImageArray::ImageArray(int dim, int M, int rank) : dim_(dim), M_(M), rank_(rank) {
    if (dim < 1 || M < 1 || rank < 1 || rank > 3) throw std::invalid_argument("ImageArray: bad shape");
    std::size_t n = static_cast<std::size_t>(dim);
    for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(M);
    data_.assign(n, 0.0);
}

std::size_t ImageArray::offset(std::initializer_list<int> r) const {
    if (static_cast<int>(r.size()) != rank_) throw std::invalid_argument("ImageArray: wrong number of indices");
    std::size_t k = 0;
    for (int v : r) {
        if (v < 1 || v > M_) throw std::out_of_range("ImageArray: index outside 1..M");
        k = k * static_cast<std::size_t>(M_) + static_cast<std::size_t>(v - 1);
    }
    return k * static_cast<std::size_t>(dim_);
}

std::span<double> ImageArray::at(int r) { return {data_.data() + offset({r}), static_cast<std::size_t>(dim_)}; }
std::span<double> ImageArray::at(int r1, int r2) {
    return {data_.data() + offset({r1, r2}), static_cast<std::size_t>(dim_)};
}
std::span<double> ImageArray::at(int r1, int r2, int r3) {
    return {data_.data() + offset({r1, r2, r3}), static_cast<std::size_t>(dim_)};
}
std::span<const double> ImageArray::at(int r) const {
    return {data_.data() + offset({r}), static_cast<std::size_t>(dim_)};
}
std::span<const double> ImageArray::at(int r1, int r2) const {
    return {data_.data() + offset({r1, r2}), static_cast<std::size_t>(dim_)};
}
std::span<const double> ImageArray::at(int r1, int r2, int r3) const {
    return {data_.data() + offset({r1, r2, r3}), static_cast<std::size_t>(dim_)};
}

namespace {

void check_shape(const ImageArray& img, int rank, const TruncatedSpectrum& s, const char* what) {
    if (img.rank() != rank || img.M() != s.M()) {
        throw std::invalid_argument(std::string(what) + ": image array shape does not match J_M (M=" +
                                    std::to_string(s.M()) + ")");
    }
}

void check_draws(const GaussianBasisDraws& d, const TruncatedSpectrum& s, int j, const char* what) {
    if (d.m < s.M() || d.q_max < j) {
        throw std::invalid_argument(std::string(what) + ": draws do not cover J_M and basis index " +
                                    std::to_string(j));
    }
}

void check_bundle(const ItoIntegralBundle& b, const TruncatedSpectrum& s, bool triples, const char* what) {
    if (b.M != s.M()) throw std::invalid_argument(std::string(what) + ": bundle M differs from J_M");
    if (triples && !b.has_triples()) throw std::invalid_argument(std::string(what) + ": bundle lacks triple integrals");
}

void axpy(double a, std::span<const double> x, std::vector<double>& y) {
    if (a == 0.0) return;
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

std::vector<double> single_sum(const ImageArray& img, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                               double c0, double c1, const char* what) {
    check_shape(img, 1, s, what);
    check_draws(d, s, c1 != 0.0 ? 1 : 0, what);
    std::vector<double> out(static_cast<std::size_t>(img.dim()), 0.0);
    for (int r = 1; r <= s.M(); ++r) {
        double w = c0 * d(r, 0);
        if (c1 != 0.0) w += c1 * d(r, 1);
        axpy(s.sqrt_eigenvalues[static_cast<std::size_t>(r - 1)] * w, img.at(r), out);
    }
    return out;
}

} // namespace

std::vector<double> assemble_J1(const ImageArray& Be, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step) {
    return single_sum(Be, d, s, std::sqrt(step), 0.0, "assemble_J1");
}

std::vector<double> assemble_J2(const ImageArray& ABe, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step) {
    return single_sum(ABe, d, s, 0.0, -std::pow(step, 1.5) / (2.0 * std::sqrt(3.0)), "assemble_J2");
}

std::vector<double> assemble_J3(const ImageArray& img, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step) {
    const double h = 0.5 * std::pow(step, 1.5);
    return single_sum(img, d, s, h, h / std::sqrt(3.0), "assemble_J3");
}

std::vector<double> assemble_J4(const ImageArray& img, const GaussianBasisDraws& d, const TruncatedSpectrum& s,
                                double step) {
    const double h = 0.5 * std::pow(step, 1.5);
    return single_sum(img, d, s, h, -h / std::sqrt(3.0), "assemble_J4");
}

std::vector<double> assemble_I1(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s) {
    check_shape(img, 2, s, "assemble_I1");
    check_bundle(b, s, false, "assemble_I1");
    std::vector<double> out(static_cast<std::size_t>(img.dim()), 0.0);
    for (int r1 = 1; r1 <= s.M(); ++r1)
        for (int r2 = 1; r2 <= s.M(); ++r2) {
            const double w = s.sqrt_eigenvalues[static_cast<std::size_t>(r1 - 1)] *
                             s.sqrt_eigenvalues[static_cast<std::size_t>(r2 - 1)] * b.i11(r1, r2);
            axpy(w, img.at(r1, r2), out);
        }
    return out;
}

std::vector<double> assemble_I2(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s) {
    check_shape(img, 3, s, "assemble_I2");
    check_bundle(b, s, true, "assemble_I2");
    std::vector<double> out(static_cast<std::size_t>(img.dim()), 0.0);
    const auto& sl = s.sqrt_eigenvalues;
    for (int r1 = 1; r1 <= s.M(); ++r1)
        for (int r2 = 1; r2 <= s.M(); ++r2)
            for (int r3 = 1; r3 <= s.M(); ++r3) {
                const double w = sl[static_cast<std::size_t>(r1 - 1)] * sl[static_cast<std::size_t>(r2 - 1)] *
                                 sl[static_cast<std::size_t>(r3 - 1)] * b.i111(r1, r2, r3);
                axpy(w, img.at(r1, r2, r3), out);
            }
    return out;
}

std::vector<double> assemble_I3(const ImageArray& img, const ItoIntegralBundle& b, const TruncatedSpectrum& s) {
    check_shape(img, 3, s, "assemble_I3");
    check_bundle(b, s, true, "assemble_I3");
    std::vector<double> out(static_cast<std::size_t>(img.dim()), 0.0);
    const auto& sl = s.sqrt_eigenvalues;
    for (int r1 = 1; r1 <= s.M(); ++r1)
        for (int r2 = 1; r2 <= s.M(); ++r2)
            for (int r3 = 1; r3 <= s.M(); ++r3) {
                double v = b.i111(r1, r2, r3) + b.i111(r2, r1, r3);
                if (r1 == r2) v += b.i01(r3);
                const double w = sl[static_cast<std::size_t>(r1 - 1)] * sl[static_cast<std::size_t>(r2 - 1)] *
                                 sl[static_cast<std::size_t>(r3 - 1)] * v;
                axpy(w, img.at(r1, r2, r3), out);
            }
    return out;
}

double theorem3_bound(double L_k, double trace_Q, int k, double parseval_gap) {
    if (L_k < 0.0 || trace_Q < 0.0 || k < 1 || parseval_gap < 0.0) {
        throw std::invalid_argument("theorem3_bound: arguments must be non-negative, k >= 1");
    }
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return L_k * fact * fact * std::pow(trace_Q, k) * parseval_gap;
}

double theorem4_tail(const QWienerSpec& spec, int M, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("theorem4_tail: alpha must be positive");
    return std::pow(truncate_spectrum(spec, M).tail_sup, 2.0 * alpha);
}

} // namespace flspde
