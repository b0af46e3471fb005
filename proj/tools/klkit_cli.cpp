// klkit command-line runner: check / approximate / converge / priormass /
// verify-bounds.  Configuration comes from an optional JSON file plus flags;
// flags win.  Exit codes: 0 success, 1 a fail verdict, 2 execution error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klkit/approximants.hpp"
#include "klkit/conditions.hpp"
#include "klkit/config.hpp"
#include "klkit/csv.hpp"
#include "klkit/densities.hpp"
#include "klkit/kernels.hpp"
#include "klkit/kl_engine.hpp"
#include "klkit/prior_mc.hpp"

namespace {

using namespace klkit;

// ---------------------------------------------------------------- flags ----

struct Flags {
    std::optional<std::string> config_path;
    std::optional<std::string> f0_name;
    std::optional<std::string> kernel_name;
    std::optional<std::string> family;
    std::optional<int> theorem;
    std::vector<int> ladder;
    std::optional<int> index;
    std::optional<double> eta, delta, eps_target, tol, epsilon, concentration;
    std::optional<int> draws, truncation, dim;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda, nu;
    std::optional<bool> b8_declared;
    std::vector<double> probes, grid;
    std::optional<std::string> out, per_draw_out;
    std::optional<std::string> base_kind, hyper_kind;
    std::optional<double> base_p1, base_p2, hyper_p1, hyper_p2;

    // density parameter flags, mapped into f0_params when present
    std::map<std::string, std::optional<double>> density_params{
        {"shape", {}}, {"rate", {}}, {"mu", {}},     {"sigma", {}},  {"loc", {}},
        {"scale", {}}, {"p", {}},    {"mu1", {}},    {"sigma1", {}}, {"mu2", {}},
        {"sigma2", {}}};

    void apply(ExperimentConfig& cfg) const {
        if (f0_name) {
            cfg.f0_name = *f0_name;
            cfg.f0_params.clear();  // flags name a density; file params do not carry over
        }
        for (const auto& [key, value] : density_params)
            if (value) cfg.f0_params[key] = *value;
        if (!cfg.f0_params.empty() && cfg.f0_name != "table")
            validate_density_params(cfg.f0_name, cfg.f0_params);
        if (kernel_name) {
            if (!family_from_name(*kernel_name))
                throw ConfigError("config: unknown kernel family '" + *kernel_name + "'");
            cfg.kernel_name = *kernel_name;
        }
        if (family) {
            if (!approximant_family_from_name(*family))
                throw ConfigError("config: unknown approximant family '" + *family + "'");
            cfg.family = *family;
        }
        if (theorem) cfg.theorem = *theorem;
        if (!ladder.empty()) cfg.ladder = ladder;
        if (index) cfg.index = *index;
        if (eta) cfg.eta = *eta;
        if (delta) cfg.delta = *delta;
        if (eps_target) cfg.eps_target = *eps_target;
        if (tol) cfg.tol = *tol;
        if (epsilon) cfg.epsilon = *epsilon;
        if (concentration) cfg.concentration = *concentration;
        if (draws) cfg.draws = *draws;
        if (truncation) cfg.truncation = *truncation;
        if (dim) cfg.dim = *dim;
        if (seed) cfg.seed = *seed;
        if (lambda) cfg.lambda = *lambda;
        if (nu) cfg.nu = *nu;
        if (b8_declared) cfg.b8_declared = *b8_declared;
        if (!probes.empty()) cfg.probes = probes;
        if (!grid.empty()) cfg.grid = grid;
        if (out) cfg.out = *out;
        if (per_draw_out) cfg.per_draw_out = *per_draw_out;
        if (base_kind) {
            cfg.base.clear();
            cfg.base.push_back(component_from(*base_kind, base_p1, base_p2));
        }
        if (hyper_kind) cfg.hyper = component_from(*hyper_kind, hyper_p1, hyper_p2);
    }

    static BaseComponent component_from(const std::string& kind, std::optional<double> p1,
                                        std::optional<double> p2) {
        BaseComponent c;
        if (kind == "normal")
            c.kind = BaseComponent::Kind::normal;
        else if (kind == "lognormal")
            c.kind = BaseComponent::Kind::lognormal;
        else if (kind == "gamma")
            c.kind = BaseComponent::Kind::gamma;
        else if (kind == "uniform")
            c.kind = BaseComponent::Kind::uniform;
        else if (kind == "point_mass")
            c.kind = BaseComponent::Kind::point_mass;
        else
            throw ConfigError("config: unknown component kind '" + kind + "'");
        if (p1) c.p1 = *p1;
        if (p2) c.p2 = *p2;
        return c;
    }
};

void add_density_flags(CLI::App* sub, Flags& fl) {
    sub->add_option("--f0", fl.f0_name, "target density name (or 'table' via --config)");
    for (auto& [key, slot] : fl.density_params)
        sub->add_option("--" + key, slot, "density parameter " + key);
}

void add_kernel_flags(CLI::App* sub, Flags& fl) {
    sub->add_option("--kernel", fl.kernel_name, "kernel family name");
    sub->add_option("--lambda", fl.lambda, "skew-normal slant");
    sub->add_option("--nu", fl.nu, "t-kernel degrees of freedom");
    sub->add_option("--dim", fl.dim, "mv_normal dimension");
}

void add_common_flags(CLI::App* sub, Flags& fl) {
    sub->add_option("--config", fl.config_path, "JSON config file (flags override it)");
    sub->add_option("--out", fl.out, "CSV output path (atomic write)");
    sub->add_option("--tol", fl.tol, "KL quadrature tolerance");
}

// ------------------------------------------------------------- defaults ----

int default_theorem(KernelFamily f) {
    switch (f) {
        case KernelFamily::skew_normal: return 4;
        case KernelFamily::mv_normal: return 5;
        case KernelFamily::double_exponential: return 6;
        case KernelFamily::logistic: return 7;
        case KernelFamily::student_t: return 8;
        case KernelFamily::histogram: return 9;
        case KernelFamily::triangular: return 10;
        case KernelFamily::bernstein: return 11;
        case KernelFamily::lognormal: return 12;
        case KernelFamily::weibull: return 13;
        case KernelFamily::gamma: return 14;
        case KernelFamily::inverse_gamma: return 15;
        case KernelFamily::exponential: return 16;
        case KernelFamily::scaled_uniform: return 17;
    }
    return 2;
}

std::optional<int> family_theorem(ApproximantFamily fam, const std::optional<KernelSpec>& k) {
    switch (fam) {
        case ApproximantFamily::location_scale:
            return k ? default_theorem(k->family) : 4;
        case ApproximantFamily::histogram: return 9;
        case ApproximantFamily::triangular: return 10;
        case ApproximantFamily::bernstein: return 11;
        case ApproximantFamily::gamma_eq15: return 14;
        case ApproximantFamily::inverse_gamma: return 15;
        case ApproximantFamily::exponential_truncated: return 16;
        case ApproximantFamily::scaled_uniform: return 17;
    }
    return std::nullopt;
}

std::vector<BaseComponent> default_base(const KernelSpec& k, std::optional<int> index) {
    using K = BaseComponent::Kind;
    const BaseComponent std_normal{K::normal, 0.0, 1.0};
    const BaseComponent pos{K::gamma, 2.0, 2.0};
    switch (k.family) {
        case KernelFamily::skew_normal:
        case KernelFamily::double_exponential:
        case KernelFamily::logistic:
        case KernelFamily::student_t:
        case KernelFamily::lognormal:
            return {std_normal};
        case KernelFamily::mv_normal:
            return std::vector<BaseComponent>(static_cast<std::size_t>(k.dim), std_normal);
        case KernelFamily::weibull:
        case KernelFamily::exponential:
        case KernelFamily::scaled_uniform:
            return {pos};
        case KernelFamily::gamma:
        case KernelFamily::inverse_gamma:
            return {pos, pos};
        case KernelFamily::histogram:
            return {BaseComponent{K::uniform, 0.0, 1.0}};
        case KernelFamily::triangular:
        case KernelFamily::bernstein:
            return {BaseComponent{K::uniform, 0.0, static_cast<double>(index.value_or(10))}};
    }
    return {std_normal};
}

std::optional<BaseComponent> default_hyper(const KernelSpec& k, std::optional<int> index) {
    if (phi_arity(k) == 0) return std::nullopt;
    using K = BaseComponent::Kind;
    switch (k.family) {
        case KernelFamily::histogram:
        case KernelFamily::triangular:
        case KernelFamily::bernstein:
            // integer resolution parameter: pin it rather than sampling
            return BaseComponent{K::point_mass, static_cast<double>(index.value_or(10)), 0.0};
        default:
            return BaseComponent{K::gamma, 2.0, 2.0};
    }
}

// --------------------------------------------------------------- output ----

std::string fnum(double x) { return format_significant(x); }

void emit(const ExperimentConfig& cfg, const CsvTable& table) {
    if (!cfg.out.empty()) {
        write_csv_atomic(cfg.out, table);
        std::cout << "csv: " << cfg.out << "\n";
    } else {
        std::cout << table.to_string();
    }
}

std::string f0_label(const ExperimentConfig& cfg) {
    std::string s = cfg.f0_name;
    for (const auto& [key, value] : cfg.f0_params) s += " " + key + "=" + fnum(value);
    return s;
}

// -------------------------------------------------------------- runners ----

int run_check(const ExperimentConfig& cfg) {
    const DensitySpec f0 = cfg.build_f0();
    const KernelSpec kernel = cfg.build_kernel();
    const int theorem = cfg.theorem.value_or(default_theorem(kernel.family));

    ConditionOptions opt;
    opt.b8_declared = cfg.b8_declared;
    auto prepend_unique = [](std::vector<double>& v, double x) {
        for (double e : v)
            if (e == x) return;
        v.insert(v.begin(), x);
    };
    prepend_unique(opt.etas, cfg.eta);
    prepend_unique(opt.deltas, cfg.delta);

    const ConditionReport rep = check_theorem(theorem, f0, kernel, opt);

    std::cout << rep.subject << "  f0=" << f0_label(cfg)
              << "  kernel=" << family_name(kernel.family) << "\n";
    for (const ConditionItem& item : rep.items) {
        std::cout << "  " << item.tag << ": " << verdict_name(item.verdict);
        if (std::isfinite(item.value)) std::cout << "  value=" << fnum(item.value);
        if (!item.detail.empty()) std::cout << "  " << item.detail;
        std::cout << "\n";
    }
    if (std::isfinite(rep.l1)) std::cout << "  l1=" << fnum(rep.l1) << "\n";
    if (std::isfinite(rep.l2)) std::cout << "  l2=" << fnum(rep.l2) << "\n";
    if (std::isfinite(rep.eta_used)) std::cout << "  eta_used=" << fnum(rep.eta_used) << "\n";
    if (std::isfinite(rep.delta_used))
        std::cout << "  delta_used=" << fnum(rep.delta_used) << "\n";
    std::cout << "overall: " << verdict_name(rep.overall()) << "\n";

    CsvTable table;
    table.columns = {"subject", "item", "verdict", "value", "detail"};
    for (const ConditionItem& item : rep.items)
        table.add_row({rep.subject, item.tag, std::string(verdict_name(item.verdict)),
                       item.value, item.detail});
    table.add_row({rep.subject, std::string("overall"),
                   std::string(verdict_name(rep.overall())), 0.0, std::string()});
    emit(cfg, table);
    return rep.overall() == Verdict::fail ? 1 : 0;
}

ApproximantSequence build_sequence(const ExperimentConfig& cfg, const DensitySpec& f0) {
    const auto fam = approximant_family_from_name(cfg.family);
    if (!fam) throw ConfigError("config: approximant family required (--family)");
    std::optional<KernelSpec> kernel;
    if (!cfg.kernel_name.empty()) kernel = cfg.build_kernel();
    return make_sequence(*fam, f0, kernel, cfg.eta);
}

int run_approximate(const ExperimentConfig& cfg) {
    const DensitySpec f0 = cfg.build_f0();
    const ApproximantSequence seq = build_sequence(cfg, f0);
    const int index = cfg.index.value_or(16);
    const MixtureDensity fm = seq.at(index);

    std::vector<double> probes = cfg.probes;
    if (probes.empty()) {
        const auto [lo, hi] = core_interval(f0, 1e-4);
        for (int k = 0; k <= 8; ++k) probes.push_back(lo + k * (hi - lo) / 8.0);
    }

    std::cout << "family=" << cfg.family << "  f0=" << f0_label(cfg) << "  index=" << index
              << "\n";
    CsvTable table;
    table.columns = {"family", "f0", "index", "x", "f0_value", "fm_value"};
    for (double x : probes) {
        const double fx = f0.pdf(x);
        const double gx = fm(x);
        std::cout << "  x=" << fnum(x) << "  f0=" << fnum(fx) << "  fm=" << fnum(gx) << "\n";
        table.add_row({cfg.family, cfg.f0_name, static_cast<long long>(index), x, fx, gx});
    }
    emit(cfg, table);
    return 0;
}

int run_converge(const ExperimentConfig& cfg) {
    const DensitySpec f0 = cfg.build_f0();
    const ApproximantSequence seq = build_sequence(cfg, f0);

    // conditions gate: report, warn, and proceed
    std::optional<KernelSpec> kernel;
    if (!cfg.kernel_name.empty()) kernel = cfg.build_kernel();
    const auto fam = *approximant_family_from_name(cfg.family);
    if (const std::optional<int> theorem = family_theorem(fam, kernel)) {
        try {
            const ConditionReport rep = check_theorem(*theorem, f0, seq.kernel, {});
            if (rep.overall() == Verdict::indeterminate)
                std::cout << "warning: hypothesis check indeterminate; proceeding\n";
            else if (rep.overall() == Verdict::fail) {
                std::string tags;
                for (const ConditionItem& item : rep.items)
                    if (item.verdict == Verdict::fail) tags += " " + item.tag;
                std::cout << "warning: hypothesis check FAILED (" << rep.subject << ":" << tags
                          << "); proceeding, convergence not guaranteed\n";
            }
        } catch (const std::exception& e) {
            std::cout << "warning: hypothesis check skipped (" << e.what() << ")\n";
        }
    }

    std::vector<int> ladder = cfg.ladder;
    if (ladder.empty()) ladder = {2, 4, 8, 16, 32, 64, 128, 256};

    const StudyTable study = convergence_study(seq, ladder, cfg.eps_target, cfg.tol);

    CsvTable table;
    table.columns = {"family", "f0", "index", "kl", "err_bound", "runtime_ms"};
    for (const StudyRow& row : study.rows) {
        std::cout << "  index=" << row.index << "  kl=" << fnum(row.kl.value)
                  << "  err_bound=" << fnum(row.kl.abs_error_bound)
                  << "  runtime_ms=" << fnum(row.runtime_ms) << "\n";
        table.add_row({cfg.family, cfg.f0_name, static_cast<long long>(row.index), row.kl.value,
                       row.kl.abs_error_bound, row.runtime_ms});
    }
    std::cout << "converged(eps_target=" << fnum(study.eps_target)
              << "): " << (study.converged ? "yes" : "no") << "\n";
    emit(cfg, table);
    return study.converged ? 0 : 1;
}

int run_priormass(const ExperimentConfig& cfg) {
    const DensitySpec f0 = cfg.build_f0();
    KernelSpec kernel;
    if (cfg.kernel_name.empty()) {
        kernel.family = KernelFamily::skew_normal;  // plain normal kernel
        kernel.lambda = 0.0;
    } else {
        kernel = cfg.build_kernel();
    }

    DPSpec dp;
    dp.base.components = cfg.base.empty() ? default_base(kernel, cfg.index) : cfg.base;
    dp.concentration = cfg.concentration;
    dp.truncation = cfg.truncation;
    std::optional<BaseComponent> hyper = cfg.hyper;
    if (!hyper) hyper = default_hyper(kernel, cfg.index);

    std::vector<DrawRecord> records;
    std::vector<DrawRecord>* per_draw = cfg.per_draw_out.empty() ? nullptr : &records;
    const MassEstimate est = kl_mass_estimate(f0, kernel, dp, hyper, cfg.epsilon, cfg.draws,
                                              cfg.seed, per_draw);

    std::cout << "epsilon=" << fnum(est.epsilon) << "  hits=" << est.hits
              << "  draws=" << est.draws << "  failures=" << est.failures
              << "  fraction=" << fnum(est.fraction) << "  wilson=["
              << fnum(est.wilson_interval.first) << ", " << fnum(est.wilson_interval.second)
              << "]\n";

    CsvTable table;
    table.columns = {"epsilon", "hits",     "draws",     "failures",
                     "fraction", "wilson_lo", "wilson_hi", "seed"};
    table.add_row({est.epsilon, static_cast<long long>(est.hits),
                   static_cast<long long>(est.draws), static_cast<long long>(est.failures),
                   est.fraction, est.wilson_interval.first, est.wilson_interval.second,
                   static_cast<long long>(cfg.seed)});
    emit(cfg, table);

    if (per_draw) {
        CsvTable detail;
        detail.columns = {"draw", "kl", "hit", "failed"};
        for (const DrawRecord& r : records)
            detail.add_row({static_cast<long long>(r.draw), r.kl,
                            static_cast<long long>(r.hit ? 1 : 0),
                            static_cast<long long>(r.failed ? 1 : 0)});
        write_csv_atomic(cfg.per_draw_out, detail);
        std::cout << "per-draw csv: " << cfg.per_draw_out << "\n";
    }
    if (est.draws > 0 && est.failures == est.draws) {
        std::cerr << "error: every draw failed to evaluate\n";
        return 2;
    }
    return 0;
}

int run_verify_bounds(const ExperimentConfig& cfg) {
    const DensitySpec f0 = cfg.build_f0();
    const auto fam = approximant_family_from_name(cfg.family);
    if (!fam || (*fam != ApproximantFamily::gamma_eq15 &&
                 *fam != ApproximantFamily::inverse_gamma))
        throw ConfigError(
            "config: verify-bounds needs --family gamma_eq15 or inverse_gamma");
    const ApproximantSequence seq = build_sequence(cfg, f0);
    const int m = cfg.index.value_or(10);

    std::vector<double> grid = cfg.grid;
    if (grid.empty()) {
        // log-spaced sweep spanning all floor branches, plus round probe points
        const double lo = 1e-3, hi = 4.0 * m;
        for (int k = 0; k < 48; ++k)
            grid.push_back(lo * std::pow(hi / lo, k / 47.0));
        for (double x : {0.2, 0.5, 1.0, 2.0, 5.0}) grid.push_back(x);
        std::sort(grid.begin(), grid.end());
    }

    const BoundReport rep = verify_lower_bounds(seq, m, grid, cfg.delta);

    CsvTable table;
    table.columns = {"family", "m", "delta", "x", "value", "floor", "branch", "status", "note"};
    for (const BoundPoint& pt : rep.points) {
        const std::string status = pt.skipped ? "skipped" : (pt.violated ? "violated" : "ok");
        table.add_row({cfg.family, static_cast<long long>(m), rep.delta, pt.x, pt.value,
                       pt.floor, pt.bound, status, pt.note});
    }
    std::cout << "family=" << cfg.family << "  m=" << m << "  delta=" << fnum(rep.delta)
              << "  points=" << rep.points.size() << "  violations=" << rep.violations()
              << "  skipped=" << rep.skips() << "\n";
    for (const BoundPoint& pt : rep.points)
        if (pt.violated)
            std::cout << "  VIOLATION x=" << fnum(pt.x) << "  fm=" << fnum(pt.value)
                      << "  floor=" << fnum(pt.floor) << "  branch=" << pt.bound << "\n";
    emit(cfg, table);
    return rep.violations() > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel-mixture KL toolkit"};
    app.require_subcommand(1);
    Flags fl;

    CLI::App* check = app.add_subcommand("check", "verify hypothesis conditions for a pairing");
    add_common_flags(check, fl);
    add_density_flags(check, fl);
    add_kernel_flags(check, fl);
    check->add_option("--theorem", fl.theorem, "result id (2-17); default chosen by kernel");
    check->add_option("--eta", fl.eta, "moment exponent to try first");
    check->add_option("--delta", fl.delta, "local-ratio window to try first");
    check->add_option("--b8-declared", fl.b8_declared,
                      "declare (true) or retract (false) the weak-support condition");

    CLI::App* approx = app.add_subcommand("approximate", "evaluate one approximant at probes");
    add_common_flags(approx, fl);
    add_density_flags(approx, fl);
    add_kernel_flags(approx, fl);
    approx->add_option("--family", fl.family, "approximant family");
    approx->add_option("--index", fl.index, "sequence index (m / n / k / a)");
    approx->add_option("--eta", fl.eta, "location-scale bandwidth exponent");
    approx->add_option("--probes", fl.probes, "evaluation points")->delimiter(',');

    CLI::App* conv = app.add_subcommand("converge", "KL along an index ladder");
    add_common_flags(conv, fl);
    add_density_flags(conv, fl);
    add_kernel_flags(conv, fl);
    conv->add_option("--family", fl.family, "approximant family");
    conv->add_option("--ladder", fl.ladder, "indices, e.g. 2,4,8")->delimiter(',');
    conv->add_option("--eta", fl.eta, "location-scale bandwidth exponent");
    conv->add_option("--eps-target", fl.eps_target, "convergence target for the final index");

    CLI::App* prior = app.add_subcommand("priormass", "Monte-Carlo KL-ball prior mass");
    add_common_flags(prior, fl);
    add_density_flags(prior, fl);
    add_kernel_flags(prior, fl);
    prior->add_option("--epsilon", fl.epsilon, "KL ball radius");
    prior->add_option("--draws", fl.draws, "Monte-Carlo draws");
    prior->add_option("--seed", fl.seed, "RNG seed");
    prior->add_option("--truncation", fl.truncation, "stick-breaking truncation");
    prior->add_option("--concentration", fl.concentration, "DP concentration");
    prior->add_option("--index", fl.index, "resolution pin for integer-hyper kernels");
    prior->add_option("--base-kind", fl.base_kind, "single-component base measure kind");
    prior->add_option("--base-p1", fl.base_p1, "base component parameter 1");
    prior->add_option("--base-p2", fl.base_p2, "base component parameter 2");
    prior->add_option("--hyper-kind", fl.hyper_kind, "hyperparameter prior kind");
    prior->add_option("--hyper-p1", fl.hyper_p1, "hyper prior parameter 1");
    prior->add_option("--hyper-p2", fl.hyper_p2, "hyper prior parameter 2");
    prior->add_option("--per-draw-out", fl.per_draw_out, "per-draw CSV path");

    CLI::App* bounds = app.add_subcommand("verify-bounds", "check closed-form floors");
    add_common_flags(bounds, fl);
    add_density_flags(bounds, fl);
    bounds->add_option("--family", fl.family, "gamma_eq15 or inverse_gamma");
    bounds->add_option("--index", fl.index, "sequence index m");
    bounds->add_option("--delta", fl.delta, "window half-width");
    bounds->add_option("--grid", fl.grid, "x grid")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ExperimentConfig cfg =
            fl.config_path ? parse_config_file(*fl.config_path) : ExperimentConfig{};
        fl.apply(cfg);
        if (check->parsed()) return run_check(cfg);
        if (approx->parsed()) return run_approximate(cfg);
        if (conv->parsed()) return run_converge(cfg);
        if (prior->parsed()) return run_priormass(cfg);
        if (bounds->parsed()) return run_verify_bounds(cfg);
        std::cerr << "error: no command\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
