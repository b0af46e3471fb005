#include "klkit/approximants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "klkit/quadrature.hpp"
#include "klkit/special_fn.hpp"

namespace klkit {
namespace {

std::string msgf(const char* fmt, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return std::string(buf);
}

void require_support(const DensitySpec& f0, Support s, const char* who) {
    if (f0.support != s || f0.dimension != 1)
        throw std::invalid_argument(std::string(who) + ": unsupported f0 domain");
}

// f0 mass on [lo, hi]; analytic CDF when available.
double mass_between(const DensitySpec& f0, double lo, double hi) {
    if (f0.has_cdf()) return f0.cdf(hi) - f0.cdf(lo);
    QuadOptions opt{1e-12, 1e-9, 40, 20000};
    return integrate(Fn1([&](double t) { return f0.pdf(t); }), lo, hi, opt).value;
}

// Solves f0(x) = level for decreasing f0, searching rightward from lo.
double solve_level_decreasing(const DensitySpec& f0, double level, double lo) {
    double hi = std::max(2.0 * lo, 1e-3);
    int guard = 0;
    while (f0.pdf(hi) > level) {
        hi *= 2.0;
        if (++guard > 200)
            throw std::runtime_error("scaled_uniform_brackets: density never drops to the target level");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f0.pdf(mid) > level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* approximant_family_name(ApproximantFamily family) {
    switch (family) {
        case ApproximantFamily::location_scale: return "location_scale";
        case ApproximantFamily::histogram: return "histogram";
        case ApproximantFamily::triangular: return "triangular";
        case ApproximantFamily::bernstein: return "bernstein";
        case ApproximantFamily::gamma_eq15: return "gamma_eq15";
        case ApproximantFamily::inverse_gamma: return "inverse_gamma";
        case ApproximantFamily::exponential_truncated: return "exponential_truncated";
        case ApproximantFamily::scaled_uniform: return "scaled_uniform";
    }
    return "?";
}

std::optional<ApproximantFamily> approximant_family_from_name(std::string_view name) {
    static constexpr std::pair<std::string_view, ApproximantFamily> table[] = {
        {"location_scale", ApproximantFamily::location_scale},
        {"histogram", ApproximantFamily::histogram},
        {"triangular", ApproximantFamily::triangular},
        {"bernstein", ApproximantFamily::bernstein},
        {"gamma_eq15", ApproximantFamily::gamma_eq15},
        {"inverse_gamma", ApproximantFamily::inverse_gamma},
        {"exponential_truncated", ApproximantFamily::exponential_truncated},
        {"scaled_uniform", ApproximantFamily::scaled_uniform},
    };
    for (const auto& [key, fam] : table)
        if (key == name) return fam;
    return std::nullopt;
}

MixtureDensity location_scale_approximant(const DensitySpec& f0,
                                          const KernelSpec& kernel, int m,
                                          double eta) {
    if (f0.dimension != 1)
        throw std::invalid_argument("location_scale_approximant: univariate f0 only");
    if (m < 1) throw std::invalid_argument("location_scale_approximant: m >= 1");
    if (!(eta > 0)) throw std::invalid_argument("location_scale_approximant: eta > 0");
    switch (kernel.family) {
        case KernelFamily::skew_normal:
        case KernelFamily::mv_normal:
        case KernelFamily::double_exponential:
        case KernelFamily::logistic:
        case KernelFamily::student_t:
            break;
        default:
            throw std::invalid_argument(
                "location_scale_approximant: kernel must be a location-scale family");
    }
    if (kernel.dim != 1)
        throw std::invalid_argument("location_scale_approximant: kernel.dim must be 1");

    const double lo = std::max(f0.lo(), -static_cast<double>(m));
    const double hi = std::min(f0.hi(), static_cast<double>(m));
    if (!(lo < hi))
        throw std::invalid_argument("location_scale_approximant: support misses [-m, m]");
    const double mass = mass_between(f0, lo, hi);
    if (!(mass > 0))
        throw std::invalid_argument("location_scale_approximant: zero f0 mass inside [-m, m]");
    const double tm = 1.0 / mass;
    const double hm = std::pow(static_cast<double>(m), -eta);

    DensitySpec base = f0;
    MixingDensity d;
    d.lo = lo;
    d.hi = hi;
    d.pdf = [base, tm](double t) { return tm * base.pdf(t); };
    d.theta_of = [](double t) { return std::vector<double>{t}; };

    MixtureDensity mix(kernel, MixingDistribution::density(std::move(d)), {hm});
    if (f0.upper_bound) mix.upper_bound = *f0.upper_bound * tm;
    mix.quad_hints = [hm](double x) {
        return std::vector<double>{x - 8 * hm, x - 2 * hm, x, x + 2 * hm, x + 8 * hm};
    };
    return mix;
}

std::vector<double> histogram_weights(const DensitySpec& f0, int m) {
    require_support(f0, Support::unit_interval, "histogram_weights");
    if (m < 1) throw std::invalid_argument("histogram_weights: m >= 1");
    std::vector<double> w(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double v = f0.pdf((i - 1.0) / m) + f0.pdf(static_cast<double>(i) / m);
        w[static_cast<std::size_t>(i - 1)] = v;
        sum += v;
    }
    if (!(sum > 0))
        throw std::invalid_argument("histogram_weights: f0 vanishes at every grid point");
    for (double& v : w) v /= sum;
    return w;
}

MixtureDensity histogram_approximant(const DensitySpec& f0, int m) {
    const std::vector<double> w = histogram_weights(f0, m);
    std::vector<MixingAtom> atoms(w.size());
    for (int i = 1; i <= m; ++i)
        atoms[static_cast<std::size_t>(i - 1)] = {{(i - 0.5) / m}, w[static_cast<std::size_t>(i - 1)]};
    return MixtureDensity(KernelSpec{.family = KernelFamily::histogram},
                          MixingDistribution::discrete(std::move(atoms)),
                          {static_cast<double>(m)});
}

std::vector<double> triangular_weights(const DensitySpec& f0, int n) {
    require_support(f0, Support::unit_interval, "triangular_weights");
    if (n < 1) throw std::invalid_argument("triangular_weights: n >= 1");
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double v = f0.pdf(static_cast<double>(i) / n);
        w[static_cast<std::size_t>(i)] = v;
        sum += v;
    }
    if (!(sum > 0))
        throw std::invalid_argument("triangular_weights: f0 vanishes at every node");
    for (double& v : w) v /= sum;
    return w;
}

MixtureDensity triangular_approximant(const DensitySpec& f0, int n) {
    const std::vector<double> w = triangular_weights(f0, n);
    std::vector<MixingAtom> atoms(w.size());
    for (int i = 0; i <= n; ++i)
        atoms[static_cast<std::size_t>(i)] = {{static_cast<double>(i)}, w[static_cast<std::size_t>(i)]};
    return MixtureDensity(KernelSpec{.family = KernelFamily::triangular},
                          MixingDistribution::discrete(std::move(atoms)),
                          {static_cast<double>(n)});
}

MixtureDensity bernstein_approximant(const DensitySpec& f0, int k) {
    require_support(f0, Support::unit_interval, "bernstein_approximant");
    if (k < 1) throw std::invalid_argument("bernstein_approximant: k >= 1");
    const double kp1 = k + 1.0;
    std::vector<MixingAtom> atoms(static_cast<std::size_t>(k) + 1);
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double a = j / kp1, b = (j + 1) / kp1;
        double wj;
        if (f0.has_cdf()) {
            wj = f0.cdf(b) - f0.cdf(a);
        } else {
            QuadOptions opt{1e-13, 1e-10, 40, 20000};
            wj = integrate(Fn1([&](double t) { return f0.pdf(t); }), a, b, opt).value;
        }
        wj = std::max(wj, 0.0);
        atoms[static_cast<std::size_t>(j)] = {{static_cast<double>(j)}, wj};
        sum += wj;
    }
    if (!(sum > 0)) throw std::invalid_argument("bernstein_approximant: zero total weight");
    for (auto& atom : atoms) atom.weight /= sum;
    return MixtureDensity(KernelSpec{.family = KernelFamily::bernstein},
                          MixingDistribution::discrete(std::move(atoms)),
                          {static_cast<double>(k)});
}

MixtureDensity gamma_eq15_approximant(const DensitySpec& f0, int m) {
    require_support(f0, Support::positive_half_line, "gamma_eq15_approximant");
    if (m < 2) throw std::invalid_argument("gamma_eq15_approximant: m >= 2");
    const double md = m;
    const double mass = mass_between(f0, 1.0 / md, md);
    if (!(mass > 0))
        throw std::invalid_argument("gamma_eq15_approximant: zero f0 mass in [1/m, m]");
    const double tm = 1.0 / mass;

    DensitySpec base = f0;
    MixingDensity d;
    d.lo = 2.0;
    d.hi = 1.0 + md * md;
    d.pdf = [base, tm, md](double alpha) { return tm / md * base.pdf((alpha - 1.0) / md); };
    d.theta_of = [md](double alpha) { return std::vector<double>{alpha, 1.0 / md}; };

    MixtureDensity mix(KernelSpec{.family = KernelFamily::gamma},
                       MixingDistribution::density(std::move(d)));
    // The integrand peaks where the digamma equation puts the kernel's
    // alpha-mode (width ~ sqrt(alpha)); the remaining hints mark where the
    // mixing factor carries mass.
    const auto core = core_interval(f0, 1e-7);
    const double alo = 1.0 + md * core.first;
    const double ahi = 1.0 + md * core.second;
    mix.quad_hints = [md, alo, ahi](double x) {
        std::vector<double> h;
        if (x > 0) {
            const double astar = inverse_digamma(std::log(md * x));
            const double sig = std::sqrt(std::max(astar, 2.0));
            h = {astar - 6 * sig, astar - 2 * sig, astar, astar + 2 * sig, astar + 6 * sig};
        }
        h.push_back(alo);
        h.push_back(ahi);
        h.push_back(0.5 * (alo + ahi));
        return h;
    };
    return mix;
}

MixtureDensity inverse_gamma_approximant(const DensitySpec& f0, int m) {
    require_support(f0, Support::positive_half_line, "inverse_gamma_approximant");
    if (m < 2) throw std::invalid_argument("inverse_gamma_approximant: m >= 2");
    const double md = m;
    const double mass = mass_between(f0, 1.0 / md, md);
    if (!(mass > 0))
        throw std::invalid_argument("inverse_gamma_approximant: zero f0 mass in [1/m, m]");
    const double tm = 1.0 / mass;

    DensitySpec base = f0;
    MixingDensity d;
    d.lo = 1.0 / md;
    d.hi = md;
    d.pdf = [base, tm](double z) { return tm * base.pdf(z); };
    d.theta_of = [md](double z) { return std::vector<double>{md, z}; };

    MixtureDensity mix(KernelSpec{.family = KernelFamily::inverse_gamma},
                       MixingDistribution::density(std::move(d)));
    // In z the kernel factor is a gamma(m+1, x/m) shape: mode x, sd ~ x/sqrt(m).
    mix.quad_hints = [md](double x) {
        if (!(x > 0)) return std::vector<double>{};
        const double sig = x / std::sqrt(md);
        return std::vector<double>{x - 6 * sig, x - 2 * sig, x, x + 2 * sig, x + 6 * sig};
    };
    return mix;
}

MixtureDensity exponential_truncation(const MixingDistribution& p0, double a) {
    if (!(a > 1)) throw std::invalid_argument("exponential_truncation: a > 1 required");
    const double lo = 1.0 / a, hi = a;
    const KernelSpec kern{.family = KernelFamily::exponential};

    if (p0.kind() == MixingDistribution::Kind::discrete) {
        std::vector<MixingAtom> kept;
        double total = 0.0;
        for (const MixingAtom& atom : p0.atoms()) {
            if (atom.theta.size() != 1)
                throw std::invalid_argument("exponential_truncation: atoms must carry a single rate");
            const double th = atom.theta[0];
            if (th >= lo && th <= hi) {
                kept.push_back(atom);
                total += atom.weight;
            }
        }
        if (!(total > 0))
            throw std::invalid_argument("exponential_truncation: truncated mixing mass is zero");
        for (MixingAtom& atom : kept) atom.weight /= total;
        return MixtureDensity(kern, MixingDistribution::discrete(std::move(kept)));
    }

    const MixingDensity& src = p0.density_part();
    const double clo = std::max(src.lo, lo), chi = std::min(src.hi, hi);
    if (!(clo < chi))
        throw std::invalid_argument("exponential_truncation: truncated mixing mass is zero");
    auto pdf = src.pdf;
    QuadOptions opt{1e-13, 1e-10, 40, 20000};
    const double mass = integrate(Fn1([&](double v) { return pdf(v); }), clo, chi, opt).value;
    if (!(mass > 0))
        throw std::invalid_argument("exponential_truncation: truncated mixing mass is zero");
    const double norm = 1.0 / mass;

    MixingDensity d;
    d.lo = clo;
    d.hi = chi;
    d.pdf = [pdf, norm](double v) { return norm * pdf(v); };
    d.theta_of = src.theta_of;

    MixtureDensity mix(kern, MixingDistribution::density(std::move(d)));
    mix.quad_hints = [clo, chi](double x) {
        std::vector<double> h{0.5 * (clo + chi)};
        if (x > 0) {
            h.push_back(1.0 / x);
            h.push_back(2.0 / x);
        }
        return h;
    };
    return mix;
}

ScaledUniformBrackets scaled_uniform_brackets(const DensitySpec& f0) {
    require_support(f0, Support::positive_half_line, "scaled_uniform_brackets");
    const double x0 = 1e-6;
    const double f_origin = f0.pdf(x0);
    if (!(f_origin > 0))
        throw std::invalid_argument("scaled_uniform_brackets: f0 vanishes near 0");
    const double a_target = 0.9 * f_origin;
    const double b_target = 0.01;
    if (!(a_target > b_target))
        throw std::invalid_argument(
            "scaled_uniform_brackets: f0(0+) too small for the default levels");
    ScaledUniformBrackets br;
    br.x1 = solve_level_decreasing(f0, a_target, x0);
    br.x2 = solve_level_decreasing(f0, b_target, br.x1);
    br.a = f0.pdf(br.x1);
    br.b = f0.pdf(br.x2);
    return br;
}

std::vector<double> scaled_uniform_weights(const DensitySpec& f0, int m,
                                           double x1, double x2) {
    require_support(f0, Support::positive_half_line, "scaled_uniform_weights");
    if (m < 1) throw std::invalid_argument("scaled_uniform_weights: m >= 1");
    if (!(0 < x1 && x1 < x2))
        throw std::invalid_argument("scaled_uniform_weights: need 0 < x1 < x2");

    const double a = f0.pdf(x1);
    const double b = f0.pdf(x2);
    if (!(a > b))
        throw std::invalid_argument("scaled_uniform_weights: levels must satisfy f0(x1) > f0(x2)");

    // Grid values f0(i/m), lazily extended; the ladder requires a decreasing
    // density, so any uptick along the grid is a hard error.
    std::vector<double> fg;
    fg.reserve(1024);
    fg.push_back(0.0);  // index 0 is never used by the weight rows
    auto fv = [&](int i) -> double {
        while (static_cast<int>(fg.size()) <= i) {
            const int j = static_cast<int>(fg.size());
            const double v = f0.pdf(static_cast<double>(j) / m);
            if (!std::isfinite(v) || v < 0)
                throw std::invalid_argument(
                    msgf("scaled_uniform_weights: f0 not finite at x = %g", static_cast<double>(j) / m));
            if (j >= 2 && v > fg[static_cast<std::size_t>(j - 1)] * (1 + 1e-12) + 1e-300)
                throw std::invalid_argument(
                    msgf("scaled_uniform_weights: f0 is not decreasing on the atom grid "
                         "(f0(%g) < f0(%g))",
                         (j - 1.0) / m, static_cast<double>(j) / m));
            fg.push_back(v);
        }
        return fg[static_cast<std::size_t>(i)];
    };

    // m1, m2 bracket the level points; the two boundary rows splice the level
    // a into the difference ladder.  Clamping keeps tiny-m cases valid.
    const int m1 = std::max(1, static_cast<int>(std::floor(x1 * m)));
    const int m2 = std::max(m1 + 1, static_cast<int>(std::floor(x2 * m)));
    auto wstar = [&](int i) -> double {
        double v;
        if (i < m1)
            v = (static_cast<double>(i) / m) * (fv(i) - fv(i + 1));
        else if (i == m1)
            v = (static_cast<double>(i) / m) * (fv(i) - a);
        else if (i == m1 + 1)
            v = (static_cast<double>(i) / m) * (a - fv(i));
        else
            v = (static_cast<double>(i) / m) * (fv(i - 1) - fv(i));
        return std::max(v, 0.0);
    };

    std::vector<double> w;
    double s_low = 0.0, s_mid = 0.0, s_high = 0.0;
    const int stride = std::max(1, m / 4);
    constexpr int hard_cap = 4'000'000;
    for (int i = 1;; ++i) {
        if (i > hard_cap)
            throw std::runtime_error("scaled_uniform_weights: weight ladder did not terminate");
        const double v = wstar(i);
        w.push_back(v);
        if (i < m1)
            s_low += v;
        else if (i <= m2)
            s_mid += v;
        else
            s_high += v;
        if (i > m2 && i % stride == 0) {
            // Remaining mass after row i: summation by parts bounds the tail
            // by (i+1)/m * f0(i/m) plus the survival mass past i/m.
            const double rest = ((i + 1.0) / m) * fv(i) + survival(f0, static_cast<double>(i) / m);
            if (rest < 1e-12) break;
        }
    }

    if (!(s_mid > 0))
        throw std::runtime_error("scaled_uniform_weights: mid-range mass vanished");
    // The raw rows do not sum to 1; scaling the [m1, m2] block (the blocks are
    // kept disjoint even though the source sums overlap at m1) restores a
    // probability vector exactly.
    const double factor = (1.0 - s_low - s_high) / s_mid;
    if (!(factor > 0))
        throw std::runtime_error("scaled_uniform_weights: renormalization factor nonpositive");
    for (int j = m1; j <= std::min<int>(m2, static_cast<int>(w.size())); ++j)
        w[static_cast<std::size_t>(j - 1)] *= factor;

    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    while (!w.empty() && w.back() <= 0.0) w.pop_back();
    return w;
}

MixtureDensity scaled_uniform_approximant(const DensitySpec& f0, int m,
                                          double x1, double x2) {
    const std::vector<double> w = scaled_uniform_weights(f0, m, x1, x2);
    std::vector<MixingAtom> atoms(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        atoms[j] = {{static_cast<double>(j + 1) / m}, w[j]};
    MixtureDensity mix(KernelSpec{.family = KernelFamily::scaled_uniform},
                       MixingDistribution::discrete(std::move(atoms)));

    // f(x) = sum over atoms with i/m >= x of w_i * m / i: a suffix-sum lookup.
    std::vector<double> suffix(w.size() + 2, 0.0);
    for (std::size_t j = w.size(); j >= 1; --j)
        suffix[j] = suffix[j + 1] + w[j - 1] * static_cast<double>(m) / static_cast<double>(j);
    const long imax = static_cast<long>(w.size());
    const double md = m;
    mix.fast_eval = [suffix = std::move(suffix), imax, md](double x) -> double {
        if (x < 0) return 0.0;
        long k = static_cast<long>(std::ceil(x * md - 1e-9));
        if (k < 1) k = 1;
        if (k > imax) return 0.0;
        return suffix[static_cast<std::size_t>(k)];
    };
    return mix;
}

MixtureDensity scaled_uniform_approximant(const DensitySpec& f0, int m) {
    const ScaledUniformBrackets br = scaled_uniform_brackets(f0);
    return scaled_uniform_approximant(f0, m, br.x1, br.x2);
}

MixtureDensity ApproximantSequence::at(int index) const {
    if (!build) throw std::logic_error("ApproximantSequence: no builder wired");
    return build(index);
}

ApproximantSequence make_sequence(ApproximantFamily family, const DensitySpec& f0,
                                  std::optional<KernelSpec> kernel, double eta) {
    ApproximantSequence seq;
    seq.family = family;
    seq.f0 = f0;
    seq.eta = eta;
    DensitySpec base = f0;
    switch (family) {
        case ApproximantFamily::location_scale: {
            const KernelSpec k =
                kernel.value_or(KernelSpec{.family = KernelFamily::skew_normal, .lambda = 0.0});
            seq.kernel = k;
            seq.build = [base, k, eta](int m) {
                return location_scale_approximant(base, k, m, eta);
            };
            break;
        }
        case ApproximantFamily::histogram:
            seq.kernel = KernelSpec{.family = KernelFamily::histogram};
            seq.build = [base](int m) { return histogram_approximant(base, m); };
            break;
        case ApproximantFamily::triangular:
            seq.kernel = KernelSpec{.family = KernelFamily::triangular};
            seq.build = [base](int n) { return triangular_approximant(base, n); };
            break;
        case ApproximantFamily::bernstein:
            seq.kernel = KernelSpec{.family = KernelFamily::bernstein};
            seq.build = [base](int k) { return bernstein_approximant(base, k); };
            break;
        case ApproximantFamily::gamma_eq15:
            seq.kernel = KernelSpec{.family = KernelFamily::gamma};
            seq.build = [base](int m) { return gamma_eq15_approximant(base, m); };
            break;
        case ApproximantFamily::inverse_gamma:
            seq.kernel = KernelSpec{.family = KernelFamily::inverse_gamma};
            seq.build = [base](int m) { return inverse_gamma_approximant(base, m); };
            break;
        case ApproximantFamily::exponential_truncated: {
            seq.kernel = KernelSpec{.family = KernelFamily::exponential};
            if (f0.name != "pareto")
                throw std::invalid_argument(
                    "make_sequence: exponential_truncated needs a mixing base measure whose "
                    "survival transform reproduces f0; only the built-in pareto density "
                    "(base Gamma(2,1)) is wired by name — use make_exponential_sequence");
            MixingDensity d;
            d.lo = 0.0;
            d.hi = 1e8;  // effectively the whole half-line; truncation clips to [1/a, a]
            d.pdf = [](double th) { return th * std::exp(-th); };
            d.theta_of = [](double th) { return std::vector<double>{th}; };
            const MixingDistribution p0 = MixingDistribution::density(std::move(d));
            seq.build = [p0](int a) {
                return exponential_truncation(p0, static_cast<double>(a));
            };
            break;
        }
        case ApproximantFamily::scaled_uniform: {
            seq.kernel = KernelSpec{.family = KernelFamily::scaled_uniform};
            const ScaledUniformBrackets br = scaled_uniform_brackets(f0);
            seq.build = [base, br](int m) {
                return scaled_uniform_approximant(base, m, br.x1, br.x2);
            };
            break;
        }
    }
    return seq;
}

ApproximantSequence make_exponential_sequence(const MixingDistribution& p0,
                                              const DensitySpec& f0) {
    ApproximantSequence seq;
    seq.family = ApproximantFamily::exponential_truncated;
    seq.f0 = f0;
    seq.kernel = KernelSpec{.family = KernelFamily::exponential};
    MixingDistribution base = p0;
    seq.build = [base](int a) { return exponential_truncation(base, static_cast<double>(a)); };
    return seq;
}

int BoundReport::violations() const {
    int n = 0;
    for (const BoundPoint& p : points) n += p.violated ? 1 : 0;
    return n;
}

int BoundReport::skips() const {
    int n = 0;
    for (const BoundPoint& p : points) n += p.skipped ? 1 : 0;
    return n;
}

BoundReport verify_lower_bounds(const ApproximantSequence& seq, int m,
                                std::span<const double> grid, double delta) {
    if (seq.family != ApproximantFamily::gamma_eq15 &&
        seq.family != ApproximantFamily::inverse_gamma)
        throw std::invalid_argument(
            "verify_lower_bounds: floors are stated for the gamma and inverse-gamma "
            "constructions only");
    if (!(delta > 0 && delta < 0.5))
        throw std::invalid_argument("verify_lower_bounds: delta must lie in (0, 1/2)");

    BoundReport rep;
    rep.family = seq.family;
    rep.m = m;
    rep.delta = delta;
    const MixtureDensity fm = seq.at(m);
    const double md = m;
    const double minv = 1.0 / md;

    for (double x : grid) {
        BoundPoint p;
        p.x = x;
        p.floor = std::numeric_limits<double>::quiet_NaN();
        if (!(x > 0)) {
            p.skipped = true;
            p.note = "floors are stated for x > 0 only";
            rep.points.push_back(std::move(p));
            continue;
        }

        double log_floor = std::numeric_limits<double>::quiet_NaN();
        if (seq.family == ApproximantFamily::gamma_eq15) {
            if (x < minv) {
                p.bound = "small_x";
                log_floor = -1.0 - std::log(x) - log_gamma(1.0 / (x * x) + 1.0);
            } else if (x > md + minv) {
                p.bound = "large_x";
                log_floor = -x * x + 3.0 * std::log(x);
            } else if (x <= md) {
                p.bound = "window";
                const double c = lemma8_envelope(x, EnvelopeParams{delta,
                                                  EnvelopeVariant::consistent_with_35});
                const double pd = phi_delta(seq.f0, x, delta, PhiDeltaVariant::one_sided);
                log_floor = std::log(c) + std::log(pd);
            } else {
                p.skipped = true;
                p.note = "between the window range (x <= m) and the far range (x > m + 1/m)";
            }
        } else {
            if (x < minv) {
                p.bound = "small_x";
                log_floor = (-2.0 / x) * std::log(x) + (-1.0 / x - 1.0) * std::log(x) -
                            std::pow(x, -3.0) - log_gamma(1.0 / x);
            } else if (x > md) {
                p.bound = "large_x";
                log_floor = -(x + 1.0) * std::log(x) - 1.0 / x - log_gamma(x);
            } else {
                p.bound = "window";
                const double c = normal_gap_envelope(x, delta);
                const double pd = phi_delta(seq.f0, x, delta, PhiDeltaVariant::one_sided);
                log_floor = std::log(c) + std::log(pd);
            }
        }

        if (p.skipped) {
            rep.points.push_back(std::move(p));
            continue;
        }
        p.floor = std::exp(log_floor);  // underflow to 0 makes the floor vacuous
        p.value = fm(x);
        p.violated = p.value < p.floor * (1.0 - 1e-9);
        rep.points.push_back(std::move(p));
    }
    return rep;
}

GammaKernelMass gamma_kernel_mass(int m, double x, double delta) {
    if (m < 2 || !(x > 0) || !(delta > 0))
        throw std::invalid_argument("gamma_kernel_mass: need m >= 2, x > 0, delta > 0");
    const double md = m;
    const double lo = 1.0 / md, hi = md;
    auto K = [md, x](double v) {
        const double shape = md * v + 1.0;
        return std::exp(std::log(md) + (shape - 1.0) * std::log(md * x) - md * x -
                        log_gamma(shape));
    };
    // Peak in v sits at the digamma-equation mode, width ~ sqrt(m x)/m.
    const double vstar = (inverse_digamma(std::log(md * x)) - 1.0) / md;
    const double sv = std::sqrt(std::max(md * x, 1.0)) / md;
    const double hints[] = {vstar - 6 * sv, vstar - 2 * sv, vstar, vstar + 2 * sv,
                            vstar + 6 * sv};
    QuadOptions opt{1e-12, 1e-9, 40, 20000};

    GammaKernelMass out;
    out.c1 = integrate(Fn1(K), lo, hi, opt, hints).value;
    double far = 0.0;
    if (x - delta > lo) far += integrate(Fn1(K), lo, std::min(x - delta, hi), opt, hints).value;
    if (x + delta < hi) far += integrate(Fn1(K), std::max(x + delta, lo), hi, opt, hints).value;
    out.c2 = far;
    if (x < 1.0)
        out.window = integrate(Fn1(K), std::max(lo, x), std::min(hi, x + delta), opt, hints).value;
    else
        out.window = integrate(Fn1(K), std::max(lo, x - delta), std::min(hi, x), opt, hints).value;
    out.envelope = lemma8_envelope(x, EnvelopeParams{delta, EnvelopeVariant::consistent_with_35});
    return out;
}

}  // namespace klkit
