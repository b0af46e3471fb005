#include "klkit/prior_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "klkit/kl_engine.hpp"
#include "klkit/parallel.hpp"
#include "klkit/rng.hpp"

namespace klkit {
namespace {

constexpr double kCoarseTol = 1e-4;
constexpr double kFineTol = 1e-7;

void validate_component(const BaseComponent& comp) {
    switch (comp.kind) {
        case BaseComponent::Kind::normal:
        case BaseComponent::Kind::lognormal:
            if (!(comp.p2 > 0))
                throw std::invalid_argument("BaseComponent: scale must be positive");
            break;
        case BaseComponent::Kind::gamma:
            if (!(comp.p1 > 0) || !(comp.p2 > 0))
                throw std::invalid_argument("BaseComponent: gamma shape and rate must be positive");
            break;
        case BaseComponent::Kind::uniform:
            if (!(comp.p1 < comp.p2))
                throw std::invalid_argument("BaseComponent: uniform needs lo < hi");
            break;
        case BaseComponent::Kind::point_mass:
            break;
    }
}

// Marsaglia-Tsang squeeze; the sub-1 shape boost consumes one extra uniform.
double sample_gamma(double shape, double rate, PhiloxStream& rng) {
    if (shape < 1.0) {
        const double u = rng.next_open01();
        return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_open01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_component(const BaseComponent& comp, PhiloxStream& rng) {
    switch (comp.kind) {
        case BaseComponent::Kind::normal:
            return comp.p1 + comp.p2 * rng.next_normal();
        case BaseComponent::Kind::lognormal:
            return std::exp(comp.p1 + comp.p2 * rng.next_normal());
        case BaseComponent::Kind::gamma:
            return sample_gamma(comp.p1, comp.p2, rng);
        case BaseComponent::Kind::uniform:
            return comp.p1 + (comp.p2 - comp.p1) * rng.next_double();
        case BaseComponent::Kind::point_mass:
            return comp.p1;
    }
    return comp.p1;
}

void validate_dp(const DPSpec& dp) {
    if (!(dp.concentration > 0))
        throw std::invalid_argument("DPSpec: concentration must be positive");
    if (dp.truncation < 1)
        throw std::invalid_argument("DPSpec: truncation must be at least 1");
    if (dp.base.components.empty())
        throw std::invalid_argument("DPSpec: base measure has no components");
    for (const BaseComponent& comp : dp.base.components) validate_component(comp);
}

// Shared per-draw body: sample the mixture, evaluate the divergence, decide
// hit/miss.  Lane 1 carries the mixing draw, lane 2 the hyper draw; lane 0
// is left to the hierarchical layer.
void evaluate_draw(const DensitySpec& f0, const KernelSpec& kernel, const DPSpec& dp,
                   const std::optional<BaseComponent>& hyper_prior, bool atoms_carry_phi,
                   double epsilon, std::uint64_t seed, std::uint64_t draw_index,
                   unsigned char* hit, unsigned char* failed, double* kl_out) {
    *hit = 0;
    *failed = 0;
    *kl_out = std::numeric_limits<double>::quiet_NaN();
    try {
        MixingDistribution mixing = stick_breaking_sample(dp, seed, draw_index);
        std::vector<double> phi;
        if (phi_arity(kernel) > 0 && !atoms_carry_phi) {
            PhiloxStream hyper_stream(seed, draw_index, /*lane=*/2);
            phi.resize(static_cast<std::size_t>(phi_arity(kernel)));
            for (double& p : phi) p = sample_component(*hyper_prior, hyper_stream);
        }
        const MixtureDensity f(kernel, std::move(mixing), std::move(phi));
        KLResult r = kl_divergence(f0, f, kCoarseTol);
        if (r.infinite) {
            *kl_out = std::numeric_limits<double>::infinity();
            return;
        }
        double value = r.value;
        if (std::abs(value - epsilon) < 10.0 * kCoarseTol) {
            // too close to call at the coarse tolerance
            const KLResult refined = kl_divergence(f0, f, kFineTol);
            value = refined.infinite ? std::numeric_limits<double>::infinity() : refined.value;
        }
        *kl_out = value;
        *hit = value < epsilon ? 1 : 0;
    } catch (const std::exception&) {
        *failed = 1;  // counted as a miss
    }
}

MassEstimate reduce_draws(double epsilon, const std::vector<unsigned char>& hit,
                          const std::vector<unsigned char>& failed,
                          const std::vector<double>& kl, std::vector<DrawRecord>* per_draw) {
    if (per_draw) {
        per_draw->resize(hit.size());
        for (std::size_t i = 0; i < hit.size(); ++i)
            (*per_draw)[i] = {static_cast<std::uint64_t>(i), kl[i], hit[i] != 0, failed[i] != 0};
    }
    MassEstimate out;
    out.epsilon = epsilon;
    out.draws = static_cast<int>(hit.size());
    out.hits = static_cast<int>(std::accumulate(hit.begin(), hit.end(), 0));
    out.failures = static_cast<int>(std::accumulate(failed.begin(), failed.end(), 0));
    out.fraction = out.draws > 0 ? static_cast<double>(out.hits) / out.draws : 0.0;
    out.wilson_interval = wilson_interval(out.hits, out.draws);
    return out;
}

bool base_carries_phi(const DPSpec& dp, const KernelSpec& kernel) {
    const std::size_t ta = static_cast<std::size_t>(theta_arity(kernel));
    const std::size_t pa = static_cast<std::size_t>(phi_arity(kernel));
    const std::size_t n = dp.base.components.size();
    if (n == ta) return false;
    if (pa > 0 && n == ta + pa) return true;
    throw std::invalid_argument(
        "DPSpec: base measure arity matches neither theta nor theta+phi of the kernel");
}

}  // namespace

std::pair<double, double> wilson_interval(int hits, int draws) {
    if (draws <= 0) return {0.0, 1.0};
    if (hits < 0 || hits > draws)
        throw std::invalid_argument("wilson_interval: hits must lie in [0, draws]");
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = draws;
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

MixingDistribution stick_breaking_sample(const DPSpec& dp, std::uint64_t seed,
                                         std::uint64_t draw_index) {
    validate_dp(dp);
    PhiloxStream rng(seed, draw_index, /*lane=*/1);
    const int n = dp.truncation;

    // weights first, then atoms: keeps the stream layout stable if the base
    // measure changes arity
    std::vector<double> w(static_cast<std::size_t>(n));
    double stick = 1.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double u = rng.next_open01();
        const double v = 1.0 - std::pow(u, 1.0 / dp.concentration);  // Beta(1, c)
        w[static_cast<std::size_t>(k)] = stick * v;
        stick *= 1.0 - v;
    }
    w[static_cast<std::size_t>(n - 1)] = stick;  // remainder lumped on the last atom

    std::vector<MixingAtom> atoms(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<double> theta(dp.base.components.size());
        for (std::size_t j = 0; j < theta.size(); ++j)
            theta[j] = sample_component(dp.base.components[j], rng);
        atoms[static_cast<std::size_t>(k)] = {std::move(theta), w[static_cast<std::size_t>(k)]};
    }
    return MixingDistribution::discrete(std::move(atoms));
}

MassEstimate kl_mass_estimate(const DensitySpec& f0, const KernelSpec& kernel,
                              const DPSpec& dp,
                              const std::optional<BaseComponent>& hyper_prior,
                              double epsilon, int n_draws, std::uint64_t seed,
                              std::vector<DrawRecord>* per_draw) {
    if (!(epsilon > 0)) throw std::invalid_argument("kl_mass_estimate: epsilon > 0");
    if (n_draws < 1) throw std::invalid_argument("kl_mass_estimate: n_draws >= 1");
    validate_dp(dp);
    const bool atoms_carry_phi = base_carries_phi(dp, kernel);
    if (phi_arity(kernel) > 0 && !atoms_carry_phi) {
        if (!hyper_prior)
            throw std::invalid_argument(
                "kl_mass_estimate: kernel takes a hyperparameter; provide hyper_prior or put "
                "it in the base measure");
        validate_component(*hyper_prior);
    }
    if (f0.support != kernel_sample_support(kernel))
        throw std::invalid_argument("kl_mass_estimate: f0 and kernel disagree on the support");

    std::vector<unsigned char> hit(static_cast<std::size_t>(n_draws), 0);
    std::vector<unsigned char> failed(static_cast<std::size_t>(n_draws), 0);
    std::vector<double> kl(static_cast<std::size_t>(n_draws), 0.0);
    const DensitySpec f0c = f0;
    parallel_for(static_cast<std::size_t>(n_draws), [&](std::size_t i) {
        evaluate_draw(f0c, kernel, dp, hyper_prior, atoms_carry_phi, epsilon, seed, i,
                      &hit[i], &failed[i], &kl[i]);
    });
    return reduce_draws(epsilon, hit, failed, kl, per_draw);
}

MassEstimate hierarchical_mass_estimate(const XiPrior& xi_prior,
                                        const std::function<DPSpec(double)>& dp_family,
                                        const DensitySpec& f0, const KernelSpec& kernel,
                                        const std::optional<BaseComponent>& hyper_prior,
                                        double epsilon, int n_draws, std::uint64_t seed,
                                        std::vector<DrawRecord>* per_draw) {
    if (!(epsilon > 0)) throw std::invalid_argument("hierarchical_mass_estimate: epsilon > 0");
    if (n_draws < 1) throw std::invalid_argument("hierarchical_mass_estimate: n_draws >= 1");
    if (xi_prior.values.empty() || xi_prior.values.size() != xi_prior.probs.size())
        throw std::invalid_argument("hierarchical_mass_estimate: xi prior is malformed");
    if (!dp_family) throw std::invalid_argument("hierarchical_mass_estimate: dp_family is empty");
    double total = 0.0;
    for (double p : xi_prior.probs) {
        if (!(p >= 0)) throw std::invalid_argument("hierarchical_mass_estimate: negative prob");
        total += p;
    }
    if (!(total > 0)) throw std::invalid_argument("hierarchical_mass_estimate: zero-mass xi prior");

    std::vector<unsigned char> hit(static_cast<std::size_t>(n_draws), 0);
    std::vector<unsigned char> failed(static_cast<std::size_t>(n_draws), 0);
    std::vector<double> kl(static_cast<std::size_t>(n_draws),
                           std::numeric_limits<double>::quiet_NaN());
    const DensitySpec f0c = f0;
    parallel_for(static_cast<std::size_t>(n_draws), [&](std::size_t i) {
        PhiloxStream xi_stream(seed, i, /*lane=*/0);
        const double u = xi_stream.next_double() * total;
        double acc = 0.0;
        double xi = xi_prior.values.back();
        for (std::size_t j = 0; j < xi_prior.values.size(); ++j) {
            acc += xi_prior.probs[j];
            if (u < acc) {
                xi = xi_prior.values[j];
                break;
            }
        }
        const DPSpec dp = dp_family(xi);
        try {
            validate_dp(dp);
            const bool atoms_carry_phi = base_carries_phi(dp, kernel);
            if (phi_arity(kernel) > 0 && !atoms_carry_phi && !hyper_prior)
                throw std::invalid_argument("hierarchical draw needs a hyper_prior");
            evaluate_draw(f0c, kernel, dp, hyper_prior, atoms_carry_phi, epsilon, seed, i,
                          &hit[i], &failed[i], &kl[i]);
        } catch (const std::exception&) {
            failed[i] = 1;
        }
    });
    return reduce_draws(epsilon, hit, failed, kl, per_draw);
}

}  // namespace klkit
