#include "flspde/spde_solver.hpp"

#include <algorithm>
#include <cmath>

namespace flspde {

const char* to_string(Scheme s) { return s == Scheme::Milstein ? "milstein" : "wagner-platen"; }

Scheme parse_scheme(const std::string& name) {
    if (name == "milstein") return Scheme::Milstein;
    if (name == "wagner-platen" || name == "wp") return Scheme::WagnerPlaten;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected milstein or wagner-platen)");
}

const char* term_group_name(TermGroup g) {
    switch (g) {
    case kTermDrift: return "drift";
    case kTermDriftTaylor: return "drift_taylor";
    case kTermTrace: return "trace";
    case kTermJ1: return "J1";
    case kTermI1: return "I1";
    case kTermJ2: return "J2";
    case kTermJ3: return "J3";
    case kTermI3: return "I3";
    case kTermJ4: return "J4";
    case kTermI2: return "I2";
    }
    return "unknown";
}

Semigroup Semigroup::make(std::span<const double> a, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("semigroup: step must be positive");
    Semigroup s;
    s.full.resize(a.size());
    s.half.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        s.full[k] = std::exp(a[k] * step);
        s.half[k] = std::exp(a[k] * step * 0.5);
    }
    return s;
}

int required_basis_index(Scheme s, const TruncationParams& t) {
    return s == Scheme::Milstein ? std::max(t.q, 1) : std::max({t.q, t.q1, 1});
}

namespace {

void add(std::vector<double>& y, const std::vector<double>& x, double w = 1.0) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += w * x[k];
}

void check_context(const GalerkinModel& model, std::span<const double> y, const StepContext& ctx, bool triples,
                   const char* what) {
    const auto n = static_cast<std::size_t>(model.dim());
    if (y.size() != n || ctx.semigroup.full.size() != n || ctx.semigroup.half.size() != n) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
    if (model.noise_free()) return;
    if (ctx.draws == nullptr || ctx.bundle == nullptr) {
        throw std::invalid_argument(std::string(what) + ": missing draws or bundle");
    }
    if (ctx.bundle->M != ctx.spectrum.M()) throw std::invalid_argument(std::string(what) + ": bundle M mismatch");
    if (triples && !ctx.bundle->has_triples()) {
        throw std::invalid_argument(std::string(what) + ": bundle lacks triple integrals");
    }
}

} // namespace

ImageArray noise_images(const GalerkinModel& model, std::span<const double> y, int M) {
    ImageArray img(model.dim(), M, 1);
    for (int r = 1; r <= M; ++r) model.B(y, r, img.at(r));
    return img;
}

ImageArray milstein_images(const GalerkinModel& model, std::span<const double> y, const ImageArray& be) {
    const int M = be.M();
    ImageArray img(model.dim(), M, 2);
    for (int r1 = 1; r1 <= M; ++r1)
        for (int r2 = 1; r2 <= M; ++r2) {
            if (model.diagonal_noise() && r1 != r2) continue;
            model.dB(y, be.at(r1), r2, img.at(r1, r2));
        }
    return img;
}

std::vector<double> milstein_step(const GalerkinModel& model, std::span<const double> y, const StepContext& ctx) {
    check_context(model, y, ctx, false, "milstein_step");
    const auto n = static_cast<std::size_t>(model.dim());
    std::vector<double> inner(y.begin(), y.end());
    std::vector<double> f(n);
    if (ctx.mask & kTermDrift) {
        model.F(y, f);
        add(inner, f, ctx.step);
    }
    if (!model.noise_free() && (ctx.mask & (kTermJ1 | kTermI1))) {
        const ImageArray be = noise_images(model, y, ctx.spectrum.M());
        if (ctx.mask & kTermJ1) add(inner, assemble_J1(be, *ctx.draws, ctx.spectrum, ctx.step));
        if (ctx.mask & kTermI1) add(inner, assemble_I1(milstein_images(model, y, be), *ctx.bundle, ctx.spectrum));
    }
    for (std::size_t k = 0; k < n; ++k) inner[k] *= ctx.semigroup.full[k];
    return inner;
}

std::vector<double> wagner_platen_step(const GalerkinModel& model, std::span<const double> y,
                                       const StepContext& ctx) {
    const bool triples = (ctx.mask & (kTermI2 | kTermI3)) != 0;
    check_context(model, y, ctx, triples, "wagner_platen_step");
    const auto n = static_cast<std::size_t>(model.dim());
    const auto a = model.a_spectrum();
    const double h = ctx.step;
    const auto& half = ctx.semigroup.half;

    std::vector<double> inner(n);
    for (std::size_t k = 0; k < n; ++k) inner[k] = half[k] * y[k];

    std::vector<double> f(n), g(n), tmp(n);
    model.F(y, f);
    for (std::size_t k = 0; k < n; ++k) g[k] = a[k] * y[k] + f[k]; // AY + F(Y)
    if (ctx.mask & kTermDrift) add(inner, f, h);
    if (ctx.mask & kTermDriftTaylor) {
        model.dF(y, g, tmp);
        add(inner, tmp, 0.5 * h * h);
    }

    if (!model.noise_free()) {
        const int M = ctx.spectrum.M();
        const ImageArray be = noise_images(model, y, M);
        if (ctx.mask & kTermTrace) {
            std::vector<double> trace(n, 0.0);
            for (int r = 1; r <= M; ++r) {
                model.d2F(y, be.at(r), be.at(r), tmp);
                add(trace, tmp, ctx.spectrum.eigenvalues[static_cast<std::size_t>(r - 1)]);
            }
            add(inner, trace, 0.25 * h * h);
        }
        if (ctx.mask & kTermJ1) add(inner, assemble_J1(be, *ctx.draws, ctx.spectrum, h));
        if (ctx.mask & kTermJ2) {
            ImageArray abe(model.dim(), M, 1);
            for (int r = 1; r <= M; ++r) {
                auto dst = abe.at(r);
                const auto src = be.at(r);
                for (std::size_t k = 0; k < n; ++k) dst[k] = a[k] * src[k];
            }
            add(inner, assemble_J2(abe, *ctx.draws, ctx.spectrum, h));
        }
        if (ctx.mask & kTermJ3) {
            ImageArray img(model.dim(), M, 1);
            for (int r = 1; r <= M; ++r) model.dB(y, g, r, img.at(r));
            add(inner, assemble_J3(img, *ctx.draws, ctx.spectrum, h));
        }
        if (ctx.mask & kTermJ4) {
            ImageArray img(model.dim(), M, 1);
            for (int r = 1; r <= M; ++r) model.dF(y, be.at(r), img.at(r));
            add(inner, assemble_J4(img, *ctx.draws, ctx.spectrum, h));
        }
        if (ctx.mask & (kTermI1 | kTermI2)) {
            const ImageArray bb = milstein_images(model, y, be);
            if (ctx.mask & kTermI1) add(inner, assemble_I1(bb, *ctx.bundle, ctx.spectrum));
            if (ctx.mask & kTermI2) {
                ImageArray img(model.dim(), M, 3);
                for (int r1 = 1; r1 <= M; ++r1)
                    for (int r2 = 1; r2 <= M; ++r2)
                        for (int r3 = 1; r3 <= M; ++r3) {
                            if (model.diagonal_noise() && (r1 != r2 || r2 != r3)) continue;
                            model.dB(y, bb.at(r1, r2), r3, img.at(r1, r2, r3));
                        }
                add(inner, assemble_I2(img, *ctx.bundle, ctx.spectrum));
            }
        }
        if (ctx.mask & kTermI3) {
            ImageArray img(model.dim(), M, 3);
            for (int r1 = 1; r1 <= M; ++r1)
                for (int r2 = 1; r2 <= M; ++r2)
                    for (int r3 = 1; r3 <= M; ++r3) {
                        if (model.diagonal_noise() && (r1 != r2 || r2 != r3)) continue;
                        model.d2B(y, be.at(r1), be.at(r2), r3, img.at(r1, r2, r3));
                    }
            add(inner, assemble_I3(img, *ctx.bundle, ctx.spectrum), 0.5);
        }
    }

    for (std::size_t k = 0; k < n; ++k) inner[k] *= half[k];
    return inner;
}

// Stepper ---------------------------------------------------------------------

Stepper::Stepper(const GalerkinModel& model, Scheme scheme, const TruncationParams& trunc, double step, TermMask mask)
    : model_(model),
      scheme_(scheme),
      trunc_(trunc),
      step_(step),
      mask_(mask),
      Q_(required_basis_index(scheme, trunc)),
      semigroup_(Semigroup::make(model.a_spectrum(), step)),
      spectrum_(truncate_spectrum(model.qspec(), trunc.M)) {
    trunc_.validate();
    if (scheme_ == Scheme::WagnerPlaten && (mask_ & (kTermI2 | kTermI3))) {
        c3_ = UnitStepCoefficients::from(CoeffTensor::build(3, trunc_.q1));
    }
}

std::vector<double> Stepper::step(std::span<const double> y, const GaussianBasisDraws& draws) const {
    StepContext ctx;
    ctx.step = step_;
    ctx.semigroup = semigroup_;
    ctx.trunc = trunc_;
    ctx.spectrum = spectrum_;
    ItoIntegralBundle bundle;
    if (!model_.noise_free()) {
        BundleRequest req;
        req.M = trunc_.M;
        req.q = trunc_.q;
        req.q1 = trunc_.q1;
        req.triples = scheme_ == Scheme::WagnerPlaten && (mask_ & (kTermI2 | kTermI3));
        bundle = build_bundle(draws, req, c3_, step_);
        ctx.draws = &draws;
        ctx.bundle = &bundle;
    }
    ctx.mask = mask_;
    return scheme_ == Scheme::Milstein ? milstein_step(model_, y, ctx) : wagner_platen_step(model_, y, ctx);
}

std::vector<double> Stepper::run(std::span<const double> y0, int n_steps, const DrawSource& draws,
                                 const std::function<void(int, std::span<const double>)>& observe) const {
    if (n_steps < 0) throw std::invalid_argument("Stepper::run: negative step count");
    std::vector<double> y(y0.begin(), y0.end());
    for (int p = 0; p < n_steps; ++p) {
        if (model_.noise_free()) {
            y = step(y, GaussianBasisDraws{});
        } else {
            y = step(y, draws(p));
        }
        if (observe) observe(p + 1, y);
    }
    return y;
}

Trajectory simulate_path(const GalerkinModel& model, const SimulationConfig& cfg) {
    if (cfg.n_steps < 0) throw std::invalid_argument("simulate_path: negative step count");
    const Stepper stepper(model, cfg.scheme, cfg.trunc, cfg.step, cfg.mask);
    RandomStream stream(cfg.seed, cfg.path_id);
    const int M = cfg.trunc.M;
    const int Q = stepper.basis_index();
    Trajectory t;
    const std::vector<double> y0 = model.initial_value();
    t.times.push_back(0.0);
    t.states.push_back(y0);
    const auto observe = [&](int p, std::span<const double> y) {
        if (cfg.record || p == cfg.n_steps) {
            t.times.push_back(p * cfg.step);
            t.states.emplace_back(y.begin(), y.end());
        }
    };
    stepper.run(y0, cfg.n_steps, [&](int) { return draw_basis(stream, M, Q); }, observe);
    return t;
}

// Coupled refinement ------------------------------------------------------------

RefinementMap::RefinementMap(int n, int Q) : n_(n), Q_(Q) {
    if (n < 1 || Q < 0) throw std::invalid_argument("RefinementMap: need n >= 1 and Q >= 0");
    const GaussRule rule = gauss_legendre(Q + 1);
    const auto w = static_cast<std::size_t>(Q + 1);
    c_.assign(w * static_cast<std::size_t>(n) * w, 0.0);
    for (int l = 0; l <= Q; ++l)
        for (int s = 0; s < n; ++s)
            for (int j = 0; j <= l; ++j) {
                double integral = 0.0;
                for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                    const double u = rule.nodes[i];
                    const double x = -1.0 + (2.0 * s + u + 1.0) / n;
                    integral += rule.weights[i] * legendre_eval(l, x) * legendre_eval(j, u);
                }
                c_[(static_cast<std::size_t>(l) * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)) * w +
                   static_cast<std::size_t>(j)] =
                    std::sqrt((2.0 * l + 1.0) * (2.0 * j + 1.0)) / (2.0 * std::sqrt(static_cast<double>(n))) *
                    integral;
            }
}

GaussianBasisDraws RefinementMap::aggregate(std::span<const GaussianBasisDraws> fine, int m) const {
    if (static_cast<int>(fine.size()) != n_) throw std::invalid_argument("RefinementMap: wrong number of substeps");
    GaussianBasisDraws out = GaussianBasisDraws::zeros(m, Q_);
    for (int s = 0; s < n_; ++s) {
        const auto& f = fine[static_cast<std::size_t>(s)];
        if (f.m < m || f.q_max < Q_) throw std::invalid_argument("RefinementMap: fine draws too small");
        for (int r = 1; r <= m; ++r)
            for (int l = 0; l <= Q_; ++l) {
                double v = 0.0;
                for (int j = 0; j <= l; ++j) v += coeff(l, s, j) * f(r, j);
                out(r, l) += v;
            }
    }
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = y[i] - fit.intercept - fit.slope * x[i];
            ssr += e * e;
        }
        fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

namespace {

int exact_ratio(double num, double den, const char* what) {
    const double r = num / den;
    const long long k = std::llround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r)) {
        throw std::invalid_argument(std::string(what) + ": " + std::to_string(num) + " is not a multiple of " +
                                    std::to_string(den));
    }
    return static_cast<int>(k);
}

} // namespace

StrongErrorResult strong_error_estimate(const GalerkinModel& model, const StrongErrorConfig& cfg) {
    if (cfg.paths < kMinStrongErrorPaths) {
        throw InsufficientPaths("strong_error_estimate: " + std::to_string(cfg.paths) + " paths requested, at least " +
                                std::to_string(kMinStrongErrorPaths) + " required");
    }
    if (cfg.steps.empty()) throw std::invalid_argument("strong_error_estimate: empty step list");
    if (!(cfg.ref_step > 0.0)) throw std::invalid_argument("strong_error_estimate: ref_step must be positive");
    cfg.trunc.validate();

    const int n_fine = exact_ratio(cfg.horizon, cfg.ref_step, "strong_error_estimate horizon");
    const TruncationParams ref_trunc = cfg.ref_trunc.value_or(cfg.trunc);
    ref_trunc.validate();
    if (ref_trunc.M != cfg.trunc.M) throw std::invalid_argument("strong_error_estimate: reference M must equal M");
    const Stepper reference(model, cfg.scheme, ref_trunc, cfg.ref_step, cfg.mask);
    const int M = cfg.trunc.M;

    struct Level {
        double step;
        int ratio;
        int n_steps;
        Stepper stepper;
        RefinementMap map;
    };
    std::vector<Level> levels;
    levels.reserve(cfg.steps.size());
    const int Q_coarse = required_basis_index(cfg.scheme, cfg.trunc);
    const int Q = std::max(reference.basis_index(), Q_coarse);
    for (double h : cfg.steps) {
        const int ratio = exact_ratio(h, cfg.ref_step, "strong_error_estimate step");
        const int n_steps = exact_ratio(cfg.horizon, h, "strong_error_estimate horizon");
        levels.push_back(Level{h, ratio, n_steps, Stepper(model, cfg.scheme, cfg.trunc, h, cfg.mask),
                               RefinementMap(ratio, Q_coarse)});
    }

    std::vector<double> sum2(levels.size(), 0.0), sum4(levels.size(), 0.0);
    const std::vector<double> y0 = model.initial_value();
    std::vector<GaussianBasisDraws> fine(static_cast<std::size_t>(n_fine));
    for (int p = 0; p < cfg.paths; ++p) {
        RandomStream stream(cfg.seed, static_cast<std::uint64_t>(p));
        for (auto& d : fine) d = draw_basis(stream, M, Q);
        const std::vector<double> ref = reference.run(y0, n_fine, [&](int i) { return fine[static_cast<std::size_t>(i)]; });
        for (std::size_t li = 0; li < levels.size(); ++li) {
            const Level& lv = levels[li];
            const std::vector<double> y = lv.stepper.run(y0, lv.n_steps, [&](int i) {
                const std::span<const GaussianBasisDraws> block(fine.data() + static_cast<std::size_t>(i) * lv.ratio,
                                                               static_cast<std::size_t>(lv.ratio));
                return lv.map.aggregate(block, M);
            });
            double e2 = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k) e2 += (y[k] - ref[k]) * (y[k] - ref[k]);
            sum2[li] += e2;
            sum4[li] += e2 * e2;
        }
    }

    StrongErrorResult res;
    std::vector<double> lx, ly;
    const double N = cfg.paths;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        StrongErrorRow row;
        row.step = levels[li].step;
        row.n_steps = levels[li].n_steps;
        const double mean2 = sum2[li] / N;
        row.rms = std::sqrt(mean2);
        const double var2 = std::max(0.0, sum4[li] / N - mean2 * mean2);
        row.rms_stderr = row.rms > 0.0 ? std::sqrt(var2 / N) / (2.0 * row.rms) : 0.0;
        res.rows.push_back(row);
        lx.push_back(std::log(row.step));
        ly.push_back(std::log(row.rms));
    }
    if (res.rows.size() >= 2) {
        const LinearFit fit = fit_line(lx, ly);
        res.slope = fit.slope;
        res.slope_stderr = fit.slope_stderr;
        res.intercept = fit.intercept;
    }
    return res;
}

std::vector<TailStudyRow> truncation_tail_study(const GalerkinModel& model, std::span<const double> y,
                                                const TailStudyConfig& cfg) {
    if (cfg.Ms.empty() || cfg.ref_factor < 2 || cfg.paths < 2 || cfg.q < 0) {
        throw std::invalid_argument("truncation_tail_study: bad configuration");
    }
    struct Level {
        int M;
        TruncatedSpectrum s, s_ref;
        ImageArray be, be_ref, bb, bb_ref;
    };
    std::vector<Level> levels;
    int max_ref = 0;
    for (int M : cfg.Ms) {
        Level lv;
        lv.M = M;
        lv.s = truncate_spectrum(model.qspec(), M);
        lv.s_ref = truncate_spectrum(model.qspec(), cfg.ref_factor * M);
        lv.be = noise_images(model, y, M);
        lv.be_ref = noise_images(model, y, cfg.ref_factor * M);
        lv.bb = milstein_images(model, y, lv.be);
        lv.bb_ref = milstein_images(model, y, lv.be_ref);
        max_ref = std::max(max_ref, cfg.ref_factor * M);
        levels.push_back(std::move(lv));
    }
    const std::size_t L = levels.size();
    std::vector<double> sj(L, 0.0), sj2(L, 0.0), si(L, 0.0), si2(L, 0.0);
    const UnitStepCoefficients none;
    for (int p = 0; p < cfg.paths; ++p) {
        RandomStream stream(cfg.seed, static_cast<std::uint64_t>(p));
        const GaussianBasisDraws d = draw_basis(stream, max_ref, std::max(cfg.q, 1));
        for (std::size_t li = 0; li < L; ++li) {
            const Level& lv = levels[li];
            BundleRequest req;
            req.q = cfg.q;
            req.triples = false;
            req.M = lv.M;
            const ItoIntegralBundle b = build_bundle(d, req, none, cfg.step);
            req.M = cfg.ref_factor * lv.M;
            const ItoIntegralBundle b_ref = build_bundle(d, req, none, cfg.step);
            const auto j = assemble_J1(lv.be, d, lv.s, cfg.step);
            const auto j_ref = assemble_J1(lv.be_ref, d, lv.s_ref, cfg.step);
            const auto i = assemble_I1(lv.bb, b, lv.s);
            const auto i_ref = assemble_I1(lv.bb_ref, b_ref, lv.s_ref);
            double ej = 0.0, ei = 0.0;
            for (std::size_t k = 0; k < j.size(); ++k) {
                ej += (j[k] - j_ref[k]) * (j[k] - j_ref[k]);
                ei += (i[k] - i_ref[k]) * (i[k] - i_ref[k]);
            }
            sj[li] += ej;
            sj2[li] += ej * ej;
            si[li] += ei;
            si2[li] += ei * ei;
        }
    }
    std::vector<TailStudyRow> rows;
    const double N = cfg.paths;
    for (std::size_t li = 0; li < L; ++li) {
        TailStudyRow row;
        row.M = levels[li].M;
        row.lambda_next = levels[li].s.tail_sup;
        row.ms_J1 = sj[li] / N;
        row.ms_I1 = si[li] / N;
        row.se_J1 = std::sqrt(std::max(0.0, sj2[li] / N - row.ms_J1 * row.ms_J1) / N);
        row.se_I1 = std::sqrt(std::max(0.0, si2[li] / N - row.ms_I1 * row.ms_I1) / N);
        rows.push_back(row);
    }
    return rows;
}

} // namespace flspde
