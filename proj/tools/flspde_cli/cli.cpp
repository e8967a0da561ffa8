#include "flspde_cli/cli.hpp"

#include "flspde/coeff_tensor.hpp"
#include "flspde_cli/integral_stats.hpp"
#include "flspde_cli/svg_plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace flspde::cli {

const char* version() { return FLSPDE_VERSION; }

std::unique_ptr<GalerkinModel> make_model(const ModelParams& p) {
    HeatModelOptions o;
    o.dim = p.dim;
    o.nu = p.nu;
    o.kappa = p.kappa;
    o.sigma = p.sigma;
    o.spectrum_rho = p.rho;
    if (p.model == "heat-noncommutative") o.noise = NoiseKind::NonCommutative;
    else if (p.model == "heat-diagonal") o.noise = NoiseKind::Diagonal;
    else if (p.model == "heat-off") o.noise = NoiseKind::Off;
    else throw CliError("input", "unknown model '" + p.model + "'");
    if (p.diffusion == "sine") o.diffusion = DiffusionKind::Sine;
    else if (p.diffusion == "affine") o.diffusion = DiffusionKind::Affine;
    else throw CliError("input", "unknown diffusion '" + p.diffusion + "'");
    return std::make_unique<HeatDiagnosticModel>(o);
}

namespace {

int parse_index(const std::string& name, const std::string& v) {
    std::size_t pos = 0;
    long n = -1;
    try {
        n = std::stol(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || n < 0 || n > 1'000'000)
        throw CliError("input", name + " must be 'auto' or a non-negative integer, got '" + v + "'");
    return static_cast<int>(n);
}

} // namespace

ResolvedTruncation resolve_truncation(int M, const std::string& q, const std::string& q1, double step, Scheme scheme) {
    ResolvedTruncation r;
    r.trunc.M = M;
    r.q_auto = q == "auto";
    r.q1_auto = q1 == "auto";
    r.trunc.q = r.q_auto ? static_cast<int>(minimal_q(step, ResidualKind::Pairwise).q) : parse_index("q", q);
    if (r.q1_auto)
        r.trunc.q1 = scheme == Scheme::Milstein ? 0 : static_cast<int>(minimal_q(step, ResidualKind::Triple).q);
    else
        r.trunc.q1 = parse_index("q1", q1);
    r.trunc.validate();
    return r;
}

TermMask mask_without(const std::vector<std::string>& disabled) {
    TermMask mask = kAllTerms;
    for (const auto& name : disabled) {
        bool found = false;
        for (int g = 0; g < kTermGroupCount; ++g) {
            const auto group = static_cast<TermGroup>(1u << g);
            if (name == term_group_name(group)) {
                mask &= ~static_cast<TermMask>(group);
                found = true;
            }
        }
        if (!found) throw CliError("input", "unknown term group '" + name + "'");
    }
    return mask;
}

namespace {

// Options -------------------------------------------------------------------

struct CoeffsOpts {
    int k = 3;
    int q = 6;
    std::string out;
    bool table2 = false;
};

struct MinimalQOpts {
    std::vector<double> steps{0.08222, 0.05020, 0.02310, 0.01956};
    std::string out;
};

struct IntegralsOpts {
    double step = 0.25;
    std::string q = "auto";
    std::string q1 = "auto";
    int q_hi = 200;
    int q1_hi = 12;
    int paths = 100000;
    std::uint64_t seed = 1;
    std::string out;
};

struct SolveOpts {
    ModelParams model;
    std::string scheme = "milstein";
    double step = 0.01;
    int n_steps = 100;
    int M = 8;
    std::string q = "auto";
    std::string q1 = "auto";
    std::uint64_t seed = 1;
    std::uint64_t path = 0;
    bool endpoint_only = false;
    std::vector<std::string> disable;
    std::string out;
};

struct ConvergenceOpts {
    ModelParams model;
    std::string scheme = "both";
    std::vector<double> steps{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    double ref_step = 0.0;
    double horizon = 1.0;
    int M = 8;
    std::string q = "auto";
    std::string q1 = "auto";
    int paths = 400;
    std::uint64_t seed = 1;
    std::string out;
    std::string plot;
};

struct Common {
    std::string config;
    bool show_config = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Flat key=value file; command-line flags override it");
    sub->add_flag("--show-config", c.show_config, "Print the effective configuration and exit");
}

void add_model_options(CLI::App* sub, ModelParams& m, const std::string& default_model) {
    m.model = default_model;
    sub->add_option("--model", m.model, "heat-noncommutative | heat-diagonal | heat-off")->capture_default_str();
    sub->add_option("--dim", m.dim, "Number of spectral modes")->capture_default_str();
    sub->add_option("--nu", m.nu, "Diffusion coefficient")->capture_default_str();
    sub->add_option("--kappa", m.kappa, "Drift amplitude")->capture_default_str();
    sub->add_option("--sigma", m.sigma, "Noise amplitude")->capture_default_str();
    sub->add_option("--diffusion", m.diffusion, "sine | affine")->capture_default_str();
    sub->add_option("--rho", m.rho, "Noise eigenvalue decay lambda_i = i^-rho")->capture_default_str();
}

// Flat config files are parsed with CLI11's reader and replayed as flags
// ahead of the command line, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
    const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (sub_it == args.end()) return args;

    std::string path;
    std::set<std::string> given;
    for (auto it = sub_it + 1; it != args.end(); ++it) {
        if (it->rfind("--", 0) != 0) continue;
        const std::string name = it->substr(2, it->find('=') == std::string::npos ? std::string::npos : it->find('=') - 2);
        given.insert(name);
        if (name == "config") {
            if (it->find('=') != std::string::npos) path = it->substr(it->find('=') + 1);
            else if (it + 1 != args.end()) path = *(it + 1);
        }
    }
    if (path.empty()) return args;

    const CLI::App* sub = app.get_subcommand_no_throw(*sub_it);
    if (sub == nullptr) return args;
    std::ifstream in(path);
    if (!in) throw CliError("config", "cannot read config file '" + path + "'");
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::ParseError& e) {
        throw CliError("config", std::string("malformed config file: ") + e.what());
    }

    std::vector<std::string> out(args.begin(), sub_it + 1);
    for (const auto& item : items) {
        if (!item.parents.empty() || item.name == "config" || sub->get_option_no_throw("--" + item.name) == nullptr)
            throw CliError("config", "unsupported key '" + item.fullname() + "' in config file");
        if (given.count(item.name)) continue;
        if (std::all_of(item.inputs.begin(), item.inputs.end(), [](const std::string& v) { return v.empty(); }))
            continue;
        if (item.inputs.size() == 1) {
            out.push_back("--" + item.name + "=" + item.inputs.front());
        } else {
            out.push_back("--" + item.name);
            out.insert(out.end(), item.inputs.begin(), item.inputs.end());
        }
    }
    out.insert(out.end(), sub_it + 1, args.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> config_echo(const CLI::App* sub) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(sub->config_to_str(true, false));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        if (key == "config" || key == "show-config" || key == "help") continue;
        out.emplace_back(key, line.substr(eq + 1));
    }
    return out;
}

void echo_config(ResultTable& t, const CLI::App* sub) {
    for (const auto& [k, v] : config_echo(sub)) t.add_meta("config." + k, v);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError("io", "cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw CliError("io", "failed writing '" + path + "'");
}

void emit(const ResultTable& t, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        t.write(out);
    } else {
        write_text(path, t.str());
        out << "wrote " << path << '\n';
    }
}

std::string checksum_for(int q1) { return tensor_checksum(CoeffTensor::build(3, q1)); }

// Commands ------------------------------------------------------------------

int cmd_coeffs(const CoeffsOpts& o, std::ostream& out) {
    if (o.k != 2 && o.k != 3) throw CliError("input", "--k must be 2 or 3");
    if (o.q < 0) throw CliError("input", "--q must be non-negative");
    if (o.table2 && (o.k != 3 || o.q < 6)) throw CliError("input", "--table2 needs --k 3 and --q >= 6");

    const CoeffTensor tensor = CoeffTensor::build(o.k, o.q);
    const std::string sum = tensor_checksum(tensor);
    if (!o.out.empty()) {
        bool up_to_date = false;
        if (std::filesystem::exists(o.out)) {
            try {
                up_to_date = tensor_checksum(load_cache(o.out, o.k)) == sum;
            } catch (const CacheError&) {
                up_to_date = false;
            }
        }
        if (up_to_date) {
            out << "# cache " << o.out << " up to date, checksum " << sum << '\n';
        } else {
            try {
                save_cache(tensor, o.out);
            } catch (const CacheError& e) {
                throw CliError("io", e.what());
            }
            out << "# wrote cache " << o.out << ", checksum " << sum << '\n';
        }
    }

    if (o.table2) {
        std::vector<std::string> cols{"j"};
        for (int k = 0; k <= 6; ++k) cols.push_back("k" + std::to_string(k));
        ResultTable t(cols);
        t.add_meta("table", "cbar_{3jk}, rows j = j2, columns k = j1");
        t.add_meta("tensor_checksum", sum);
        for (int j = 0; j <= 6; ++j) {
            std::vector<Cell> row{std::int64_t{j}};
            for (int k = 0; k <= 6; ++k) row.emplace_back(tensor.at(3, j, k).get_str());
            t.add_row(std::move(row));
        }
        t.write(out);
        return 0;
    }

    std::vector<std::string> cols;
    for (int l = o.k; l >= 1; --l) cols.push_back("j" + std::to_string(l));
    cols.push_back("cbar");
    cols.push_back("cbar_value");
    ResultTable t(cols);
    t.add_meta("version", version());
    t.add_meta("tensor_checksum", sum);
    const int n = o.q + 1;
    for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
        std::vector<Cell> row(cols.size());
        std::size_t rem = flat;
        for (int l = o.k - 1; l >= 0; --l) {
            row[static_cast<std::size_t>(l)] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        const Rational& v = tensor.entries()[flat];
        row[static_cast<std::size_t>(o.k)] = v.get_str();
        row[static_cast<std::size_t>(o.k) + 1] = v.get_d();
        t.add_row(std::move(row));
    }
    t.write(out);
    return 0;
}

int cmd_minimal_q(const MinimalQOpts& o, const CLI::App* sub, std::ostream& out) {
    ResultTable t({"step", "q", "q1", "residual_q", "residual_q1", "criterion", "boundary_q", "boundary_q1"});
    t.add_meta("version", version());
    t.add_meta("units", "residuals and criterion (= step^4) are mean-square errors");
    echo_config(t, sub);
    for (double h : o.steps) {
        const auto p = minimal_q(h, ResidualKind::Pairwise);
        const auto r = minimal_q(h, ResidualKind::Triple);
        t.add_row({h, std::int64_t{p.q}, std::int64_t{r.q}, p.residual_at, r.residual_at, p.criterion,
                   std::int64_t{p.boundary}, std::int64_t{r.boundary}});
    }
    emit(t, o.out, out);
    return 0;
}

int cmd_simulate_integrals(const IntegralsOpts& o, const CLI::App* sub, std::ostream& out) {
    const auto res = resolve_truncation(3, o.q, o.q1, o.step, Scheme::WagnerPlaten);
    IntegralStatsConfig cfg;
    cfg.step = o.step;
    cfg.q = res.trunc.q;
    cfg.q1 = res.trunc.q1;
    cfg.q_hi = o.q_hi;
    cfg.q1_hi = o.q1_hi;
    cfg.paths = o.paths;
    cfg.seed = o.seed;
    if (cfg.q1_hi < 0) throw CliError("input", "--q1-hi must be non-negative");
    const CoeffTensor c3 = CoeffTensor::build(3, cfg.q1_hi);
    const auto r = simulate_integral_statistics(cfg, c3);

    ResultTable t({"statistic", "empirical", "stderr", "analytic", "rel_error", "z_score"});
    t.add_meta("version", version());
    t.add_meta("seed", std::to_string(o.seed));
    echo_config(t, sub);
    t.add_meta("resolved_q", std::to_string(cfg.q));
    t.add_meta("resolved_q1", std::to_string(cfg.q1));
    t.add_meta("tensor_checksum", tensor_checksum(c3));
    t.add_meta("units", "moments in powers of the step; ms_error rows compare against residual(q) - residual(q_hi)");
    for (const auto& s : r.stats) {
        const double rel = s.analytic != 0.0 ? (s.empirical - s.analytic) / std::abs(s.analytic) : s.empirical;
        const double z = s.stderr_ > 0.0 ? (s.empirical - s.analytic) / s.stderr_ : 0.0;
        t.add_row({s.name, s.empirical, s.stderr_, s.analytic, rel, z});
    }
    t.add_row({std::string("identity_violations"), static_cast<double>(r.identity_violations), 0.0, 0.0,
               static_cast<double>(r.identity_violations), 0.0});
    emit(t, o.out, out);
    return 0;
}

int cmd_solve(const SolveOpts& o, const CLI::App* sub, std::ostream& out) {
    const auto model = make_model(o.model);
    const Scheme scheme = parse_scheme(o.scheme);
    if (!(o.step > 0.0) || o.n_steps < 1) throw CliError("input", "--step must be positive and --n-steps >= 1");
    const auto res = resolve_truncation(o.M, o.q, o.q1, std::min(o.step, 1.0), scheme);
    SimulationConfig cfg;
    cfg.scheme = scheme;
    cfg.trunc = res.trunc;
    cfg.step = o.step;
    cfg.n_steps = o.n_steps;
    cfg.seed = o.seed;
    cfg.path_id = o.path;
    cfg.record = !o.endpoint_only;
    cfg.mask = mask_without(o.disable);
    const auto tr = simulate_path(*model, cfg);

    std::vector<std::string> cols{"step_index", "time"};
    for (int k = 1; k <= model->dim(); ++k) cols.push_back("y_" + std::to_string(k));
    ResultTable t(cols);
    t.add_meta("version", version());
    t.add_meta("seed", std::to_string(o.seed));
    echo_config(t, sub);
    t.add_meta("resolved_M", std::to_string(res.trunc.M));
    t.add_meta("resolved_q", std::to_string(res.trunc.q));
    t.add_meta("resolved_q1", std::to_string(res.trunc.q1));
    t.add_meta("tensor_checksum", scheme == Scheme::WagnerPlaten ? checksum_for(res.trunc.q1) : "none");
    t.add_meta("units", "y_k is the k-th spectral coordinate at the given time");
    for (std::size_t p = 0; p < tr.states.size(); ++p) {
        const std::int64_t index = o.endpoint_only && p > 0 ? o.n_steps : static_cast<std::int64_t>(p);
        std::vector<Cell> row{index, tr.times[p]};
        for (double v : tr.states[p]) row.emplace_back(v);
        t.add_row(std::move(row));
    }
    emit(t, o.out, out);
    return 0;
}

int cmd_convergence(const ConvergenceOpts& o, const CLI::App* sub, std::ostream& out) {
    const auto model = make_model(o.model);
    if (o.steps.empty()) throw CliError("input", "--steps is empty");
    std::vector<Scheme> schemes;
    if (o.scheme == "both") schemes = {Scheme::Milstein, Scheme::WagnerPlaten};
    else schemes = {parse_scheme(o.scheme)};
    const double h_max = *std::max_element(o.steps.begin(), o.steps.end());
    const double h_min = *std::min_element(o.steps.begin(), o.steps.end());
    const double ref = o.ref_step > 0.0 ? o.ref_step : h_min / 8.0;

    ResultTable t({"scheme", "step", "n_steps", "rms", "rms_stderr", "M", "q", "q1"});
    t.add_meta("version", version());
    t.add_meta("seed", std::to_string(o.seed));
    echo_config(t, sub);
    t.add_meta("ref_step", format_number(ref));
    t.add_meta("units", "rms is the root-mean-square H-norm endpoint error against the reference run");

    std::vector<PlotSeries> series;
    std::ostringstream summary;
    for (Scheme s : schemes) {
        const auto res = resolve_truncation(o.M, o.q, o.q1, std::min(h_max, 1.0), s);
        StrongErrorConfig cfg;
        cfg.scheme = s;
        cfg.trunc = res.trunc;
        cfg.steps = o.steps;
        cfg.ref_step = ref;
        cfg.horizon = o.horizon;
        cfg.paths = o.paths;
        cfg.seed = o.seed;
        const auto r = strong_error_estimate(*model, cfg);
        const std::string name = to_string(s);
        t.add_meta(name + ".resolved_truncation", "M=" + std::to_string(res.trunc.M) + " q=" +
                                                      std::to_string(res.trunc.q) + " q1=" +
                                                      std::to_string(res.trunc.q1));
        t.add_meta(name + ".slope", format_number(r.slope));
        t.add_meta(name + ".slope_stderr", format_number(r.slope_stderr));
        t.add_meta(name + ".tensor_checksum", s == Scheme::WagnerPlaten ? checksum_for(res.trunc.q1) : "none");
        PlotSeries ps;
        ps.label = name + " (slope " + format_number(std::round(r.slope * 1000.0) / 1000.0) + ")";
        for (const auto& row : r.rows) {
            t.add_row({name, row.step, std::int64_t{row.n_steps}, row.rms, row.rms_stderr, std::int64_t{res.trunc.M},
                       std::int64_t{res.trunc.q}, std::int64_t{res.trunc.q1}});
            ps.x.push_back(row.step);
            ps.y.push_back(row.rms);
        }
        ps.fit = std::pair{r.slope, r.intercept / std::log(10.0)};
        series.push_back(std::move(ps));
        summary << name << " slope " << format_number(r.slope) << " +- " << format_number(r.slope_stderr) << '\n';
    }
    emit(t, o.out, out);

    std::string plot = o.plot;
    if (plot.empty() && !o.out.empty()) plot = std::filesystem::path(o.out).replace_extension(".svg").string();
    if (!plot.empty()) {
        PlotSpec spec;
        spec.title = "Strong error, model " + o.model.model;
        spec.x_label = "step";
        spec.y_label = "RMS endpoint error";
        write_text(plot, render_loglog_svg(spec, series));
        out << "wrote " << plot << '\n';
    }
    if (!o.out.empty()) out << summary.str();
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Iterated Ito integral approximation and exponential SPDE schemes"};
    app.name("flspde");
    app.set_help_all_flag("--help-all", "Help for every command");
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Common common;

    CoeffsOpts co;
    auto* coeffs = app.add_subcommand("coeffs", "Exact Fourier-Legendre coefficients and the FLC cache");
    coeffs->add_option("--k", co.k, "Multiplicity, 2 or 3")->capture_default_str();
    coeffs->add_option("--q", co.q, "Largest basis index")->capture_default_str();
    coeffs->add_option("--out", co.out, "Cache file to write");
    coeffs->add_flag("--table2", co.table2, "Print the 7x7 slice cbar_{3jk} as fractions");
    add_common(coeffs, common);

    MinimalQOpts mo;
    auto* mq = app.add_subcommand("minimal-q", "Smallest truncations meeting residual <= step^4");
    mq->add_option("--steps,--step", mo.steps, "Step sizes")->delimiter(',')->capture_default_str();
    mq->add_option("--out", mo.out, "CSV output path");
    add_common(mq, common);

    IntegralsOpts io;
    auto* si = app.add_subcommand("simulate-integrals", "Monte Carlo moments of the approximated integrals");
    si->add_option("--step", io.step, "Interval length")->capture_default_str();
    si->add_option("--q", io.q, "Double-integral truncation or auto")->capture_default_str();
    si->add_option("--q1", io.q1, "Triple-integral truncation or auto")->capture_default_str();
    si->add_option("--q-hi", io.q_hi, "Reference truncation for double integrals")->capture_default_str();
    si->add_option("--q1-hi", io.q1_hi, "Reference truncation for triple integrals")->capture_default_str();
    si->add_option("--paths", io.paths, "Samples")->capture_default_str();
    si->add_option("--seed", io.seed, "Root seed")->capture_default_str();
    si->add_option("--out", io.out, "CSV output path");
    add_common(si, common);

    SolveOpts so;
    auto* solve = app.add_subcommand("solve", "Simulate one path of the spectral model");
    add_model_options(solve, so.model, "heat-noncommutative");
    solve->add_option("--scheme", so.scheme, "milstein | wagner-platen")->capture_default_str();
    solve->add_option("--step", so.step, "Time step")->capture_default_str();
    solve->add_option("--n-steps", so.n_steps, "Number of steps")->capture_default_str();
    solve->add_option("--M", so.M, "Noise modes retained")->capture_default_str();
    solve->add_option("--q", so.q, "Double-integral truncation or auto")->capture_default_str();
    solve->add_option("--q1", so.q1, "Triple-integral truncation or auto")->capture_default_str();
    solve->add_option("--seed", so.seed, "Root seed")->capture_default_str();
    solve->add_option("--path", so.path, "Path index within the seed")->capture_default_str();
    solve->add_flag("--endpoint-only", so.endpoint_only, "Write only the initial and final states");
    solve->add_option("--disable", so.disable, "Term groups to switch off, e.g. J2,I3")->delimiter(',');
    solve->add_option("--out", so.out, "CSV output path");
    add_common(solve, common);

    ConvergenceOpts cv;
    auto* conv = app.add_subcommand("convergence", "Strong error against a coupled fine reference");
    add_model_options(conv, cv.model, "heat-diagonal");
    conv->add_option("--scheme", cv.scheme, "milstein | wagner-platen | both")->capture_default_str();
    conv->add_option("--steps,--step", cv.steps, "Step sizes")->delimiter(',')->capture_default_str();
    conv->add_option("--ref-step", cv.ref_step, "Reference step, 0 for the smallest step / 8")->capture_default_str();
    conv->add_option("--horizon", cv.horizon, "Final time")->capture_default_str();
    conv->add_option("--M", cv.M, "Noise modes retained")->capture_default_str();
    conv->add_option("--q", cv.q, "Double-integral truncation or auto")->capture_default_str();
    conv->add_option("--q1", cv.q1, "Triple-integral truncation or auto")->capture_default_str();
    conv->add_option("--paths", cv.paths, "Coupled paths")->capture_default_str();
    conv->add_option("--seed", cv.seed, "Root seed")->capture_default_str();
    conv->add_option("--out", cv.out, "CSV output path");
    conv->add_option("--plot", cv.plot, "SVG output path, defaults next to --out");
    add_common(conv, common);

    try {
        std::vector<std::string> args = expand_config(raw_args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    } catch (const CliError& e) {
        err << "error[" << e.category() << "]: " << e.what() << '\n';
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (common.show_config) {
        for (const auto& [k, v] : config_echo(sub)) out << k << '=' << v << '\n';
        return 0;
    }

    try {
        if (sub == coeffs) return cmd_coeffs(co, out);
        if (sub == mq) return cmd_minimal_q(mo, sub, out);
        if (sub == si) return cmd_simulate_integrals(io, sub, out);
        if (sub == solve) return cmd_solve(so, sub, out);
        return cmd_convergence(cv, sub, out);
    } catch (const CliError& e) {
        err << "error[" << e.category() << "]: " << e.what() << '\n';
    } catch (const CacheError& e) {
        err << "error[cache]: " << e.what() << '\n';
    } catch (const SearchCapExceeded& e) {
        err << "error[search-cap]: " << e.what() << '\n';
    } catch (const InsufficientPaths& e) {
        err << "error[input]: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        err << "error[input]: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error[runtime]: " << e.what() << '\n';
    }
    return 1;
}

} // namespace flspde::cli
