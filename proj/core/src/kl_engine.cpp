#include "klkit/kl_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "klkit/kernels.hpp"
#include "klkit/parallel.hpp"
#include "klkit/quadrature.hpp"

namespace klkit {
namespace {

constexpr double kLogTiny = -690.7755278982137;  // ln(1e-300)
constexpr double kMassFloor = 1e-12;
constexpr int kScanPoints = 129;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Change of variables onto a bounded t-interval; identity when (lo, hi) is
// already bounded.
struct Domain {
    std::function<double(double)> fwd;  // t -> x
    std::function<double(double)> jac;  // dx/dt (positive)
    std::function<double(double)> inv;  // x -> t
    double t_lo = 0.0;
    double t_hi = 1.0;
    bool mapped = false;
};

Domain make_domain(double lo, double hi) {
    constexpr double eps = 1e-14;
    Domain d;
    if (std::isinf(lo) && std::isinf(hi)) {
        d.fwd = [](double t) { return rational_map(t); };
        d.jac = [](double t) { return rational_map_jacobian(t); };
        d.inv = [](double x) { return inverse_rational_map(x); };
        d.t_lo = -1.0 + eps;
        d.t_hi = 1.0 - eps;
        d.mapped = true;
    } else if (std::isinf(hi)) {
        d.fwd = [lo](double t) { return lo + rational_map(t); };
        d.jac = [](double t) { return rational_map_jacobian(t); };
        d.inv = [lo](double x) { return inverse_rational_map(x - lo); };
        d.t_lo = 0.0;
        d.t_hi = 1.0 - eps;
        d.mapped = true;
    } else if (std::isinf(lo)) {
        d.fwd = [hi](double t) { return hi - rational_map(t); };
        d.jac = [](double t) { return rational_map_jacobian(t); };
        d.inv = [hi](double x) { return inverse_rational_map(hi - x); };
        d.t_lo = 0.0;
        d.t_hi = 1.0 - eps;
        d.mapped = true;
    } else {
        if (!(lo < hi)) throw std::invalid_argument("kl_divergence: empty support");
        d.fwd = [](double t) { return t; };
        d.jac = [](double) { return 1.0; };
        d.inv = [](double x) { return x; };
        d.t_lo = lo;
        d.t_hi = hi;
    }
    return d;
}

}  // namespace

KLResult kl_divergence(const LogDensity& log_f, const LogDensity& log_g,
                       double lo, double hi, double tol, std::span<const double> seeds) {
    if (!(tol > 0)) throw std::invalid_argument("kl_divergence: tol > 0 required");
    const Domain dom = make_domain(lo, hi);

    auto integrand = [&](double t, bool* flag) -> double {
        const double x = dom.fwd(t);
        const double lf = log_f(x);
        if (std::isnan(lf)) return std::numeric_limits<double>::quiet_NaN();
        const double fx = std::exp(lf);
        if (fx == 0.0) return 0.0;  // f log(f/g) -> 0 where f vanishes
        double lg = log_g(x);
        if (std::isnan(lg)) return std::numeric_limits<double>::quiet_NaN();
        if (lg < kLogTiny) {
            if (fx > kMassFloor) *flag = true;
            lg = kLogTiny;
        }
        return fx * (lf - lg) * dom.jac(t);
    };

    // log-ratio sign: used only for root bracketing
    auto ratio = [&](double t) -> double {
        const double x = dom.fwd(t);
        const double lf = log_f(x);
        double lg = log_g(x);
        if (std::isnan(lf) || std::isnan(lg)) return std::numeric_limits<double>::quiet_NaN();
        if (lg < kLogTiny) lg = kLogTiny;
        if (lf == -kInf) return -kInf;
        return lf - lg;
    };

    const double step = (dom.t_hi - dom.t_lo) / kScanPoints;
    std::vector<double> hints;
    for (double s : seeds) {
        const double t = dom.inv(s);
        if (t > dom.t_lo && t < dom.t_hi && std::isfinite(t)) hints.push_back(t);
    }
    double prev_t = dom.t_lo + 0.5 * step;
    double prev_s = ratio(prev_t);
    int roots = 0;
    for (int k = 1; k < kScanPoints && roots < 64; ++k) {
        const double t = dom.t_lo + (k + 0.5) * step;
        const double s = ratio(t);
        if (std::isfinite(prev_s) && std::isfinite(s) &&
            ((prev_s < 0 && s > 0) || (prev_s > 0 && s < 0))) {
            double a = prev_t, b = t, sa = prev_s;
            for (int it = 0; it < 12; ++it) {
                const double m = 0.5 * (a + b);
                const double sm = ratio(m);
                if (!std::isfinite(sm)) break;
                if ((sa < 0) == (sm < 0)) {
                    a = m;
                    sa = sm;
                } else {
                    b = m;
                }
            }
            hints.push_back(0.5 * (a + b));
            ++roots;
        }
        if (!std::isnan(s)) {
            prev_t = t;
            prev_s = s;
        }
    }

    QuadOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = 0.0;
    opt.collect_leaves = true;
    const QuadResult r = integrate(FlaggedFn(integrand), dom.t_lo, dom.t_hi, opt, hints);

    KLResult out;
    out.evaluations = r.evaluations;
    out.split_points.reserve(r.leaf_edges.size());
    for (double e : r.leaf_edges) out.split_points.push_back(dom.fwd(e));
    std::sort(out.split_points.begin(), out.split_points.end());
    out.split_points.erase(std::unique(out.split_points.begin(), out.split_points.end()),
                           out.split_points.end());

    if (r.flagged_panels >= 3) {
        out.infinite = true;
        out.value = kInf;
        out.abs_error_bound = kInf;
        return out;
    }
    if (!r.converged)
        throw QuadratureError("kl quadrature did not converge", r.error);

    out.value = r.value;
    out.abs_error_bound = r.error;
    out.converged = true;
    if (dom.mapped && !r.leaf_edges.empty()) {
        const double t_first = dom.t_lo + 0.5 * step;
        const double t_last = dom.t_lo + (kScanPoints - 0.5) * step;
        double tail = 0.0;
        for (std::size_t i = 0; i + 1 < r.leaf_edges.size(); ++i) {
            if (r.leaf_edges[i] >= t_last || r.leaf_edges[i + 1] <= t_first)
                tail += r.leaf_values[i];
        }
        out.tail_contribution = tail;
    }
    return out;
}

namespace {

std::vector<double> default_seeds(const DensitySpec& f) {
    const auto core = core_interval(f, 1e-4);
    return {core.first, 0.5 * (core.first + core.second), core.second};
}

}  // namespace

KLResult kl_divergence(const DensitySpec& f, const DensitySpec& g, double tol) {
    if (f.support != g.support)
        throw std::invalid_argument("kl_divergence: densities live on different supports");
    if (f.dimension != 1 || g.dimension != 1)
        throw std::invalid_argument("kl_divergence: univariate densities only");
    const DensitySpec fc = f, gc = g;
    const std::vector<double> seeds = default_seeds(f);
    return kl_divergence([fc](double x) { return fc.log_eval(x); },
                         [gc](double x) { return gc.log_eval(x); }, f.lo(), f.hi(), tol,
                         seeds);
}

KLResult kl_divergence(const DensitySpec& f, const MixtureDensity& g, double tol) {
    if (f.support != kernel_sample_support(g.kernel()))
        throw std::invalid_argument("kl_divergence: mixture lives on a different support");
    if (f.dimension != 1)
        throw std::invalid_argument("kl_divergence: univariate densities only");
    const DensitySpec fc = f;
    const MixtureDensity gc = g;
    const std::vector<double> seeds = default_seeds(f);
    return kl_divergence([fc](double x) { return fc.log_eval(x); },
                         [gc](double x) { return gc.log_eval(x); }, f.lo(), f.hi(), tol,
                         seeds);
}

std::pair<DensitySpec, double> floor_transform(const DensitySpec& f0, double floor) {
    if (f0.support != Support::unit_interval || f0.dimension != 1)
        throw std::invalid_argument("floor_transform: f0 must live on [0, 1]");
    if (!(floor > 0)) throw std::invalid_argument("floor_transform: floor > 0 required");

    // crossing points of f0 - floor seed the normalizer quadrature
    std::vector<double> hints;
    double prev = f0.pdf(0.0) - floor;
    for (int k = 1; k <= 128; ++k) {
        const double x = k / 128.0;
        const double cur = f0.pdf(x) - floor;
        if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0)) hints.push_back(x - 0.5 / 128.0);
        prev = cur;
    }
    QuadOptions opt{1e-12, 1e-10, 40, 20000};
    const DensitySpec base = f0;
    const double c =
        integrate(Fn1([&](double x) { return std::max(base.pdf(x), floor); }), 0.0, 1.0, opt,
                  hints)
            .value;

    DensitySpec f1;
    f1.name = f0.name.empty() ? "floored" : f0.name + "_floored";
    f1.support = Support::unit_interval;
    f1.dimension = 1;
    const double inv_c = 1.0 / c;
    f1.pdf = [base, floor, inv_c](double x) { return std::max(base.pdf(x), floor) * inv_c; };
    f1.log_pdf = [base, floor, inv_c](double x) {
        return std::log(std::max(base.pdf(x), floor) * inv_c);
    };
    if (f0.upper_bound) f1.upper_bound = std::max(*f0.upper_bound, floor) * inv_c;
    return {std::move(f1), c};
}

Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const LogDensity& log_f, double m) {
    if (f0.support != Support::unit_interval || f0.dimension != 1)
        throw std::invalid_argument("lemma4_bound_check: f0 must live on [0, 1]");
    auto [f1, c] = floor_transform(f0, m);

    Lemma4Bound out;
    out.c = c;
    const DensitySpec f0c = f0, f1c = f1;
    const KLResult k0 = kl_divergence([f0c](double x) { return f0c.log_eval(x); }, log_f,
                                      0.0, 1.0, 1e-8, default_seeds(f0));
    const KLResult k1 = kl_divergence([f1c](double x) { return f1c.log_eval(x); }, log_f,
                                      0.0, 1.0, 1e-8, default_seeds(f0));
    out.lhs = k0.value;
    out.rhs = (c + 1.0) * std::log(c) + k1.value + std::sqrt(std::max(k1.value, 0.0));
    if (k0.infinite || k1.infinite) {
        out.verdict = Verdict::indeterminate;
        return out;
    }
    out.error_budget = 2.0 * (k0.abs_error_bound + k1.abs_error_bound);
    out.verdict = out.lhs <= out.rhs + out.error_budget ? Verdict::pass : Verdict::fail;
    return out;
}

Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const DensitySpec& f, double m) {
    const DensitySpec fc = f;
    return lemma4_bound_check(f0, [fc](double x) { return fc.log_eval(x); }, m);
}

Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const MixtureDensity& f, double m) {
    const MixtureDensity fc = f;
    return lemma4_bound_check(f0, [fc](double x) { return fc.log_eval(x); }, m);
}

StudyTable convergence_study(const ApproximantSequence& seq, std::span<const int> ladder,
                             double eps_target, double tol) {
    StudyTable table;
    table.eps_target = eps_target;
    table.rows.resize(ladder.size());

    const DensitySpec f0 = seq.f0;
    parallel_for(ladder.size(), [&](std::size_t i) {
        StudyRow& row = table.rows[i];
        row.index = ladder[i];
        const auto start = std::chrono::steady_clock::now();
        const MixtureDensity fm = seq.at(row.index);
        row.kl = kl_divergence(f0, fm, tol);
        row.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
    });

    if (!table.rows.empty()) {
        const KLResult& last = table.rows.back().kl;
        bool ok = !last.infinite && last.value < eps_target;
        const std::size_t n = table.rows.size();
        const std::size_t from = n > 3 ? n - 3 : 0;
        for (std::size_t i = from; ok && i + 1 < n; ++i) {
            const KLResult& a = table.rows[i].kl;
            const KLResult& b = table.rows[i + 1].kl;
            if (a.infinite || b.infinite) {
                ok = false;
                break;
            }
            ok = b.value <= a.value + a.abs_error_bound + b.abs_error_bound;
        }
        table.converged = ok;
    }
    return table;
}

}  // namespace klkit
