#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "klkit/densities.hpp"
#include "klkit/kernels.hpp"
#include "klkit/mixtures.hpp"

namespace klkit {

// One coordinate of the base measure (or a hyperparameter prior).
// Parameter meaning by kind:
//   normal(mu, sigma) | lognormal(mu, sigma) | gamma(shape, rate) |
//   uniform(lo, hi)   | point_mass(value, -)
struct BaseComponent {
    enum class Kind { normal, lognormal, gamma, uniform, point_mass };
    Kind kind = Kind::normal;
    double p1 = 0.0;
    double p2 = 1.0;
};

// Product measure over the kernel's theta coordinates; may carry one extra
// trailing component when atoms should include a per-atom hyperparameter
// (a measure on Theta x Phi).
struct BaseMeasure {
    std::vector<BaseComponent> components;
};

struct DPSpec {
    BaseMeasure base;
    double concentration = 1.0;
    int truncation = 500;  // stick-breaking atoms; remainder lumped on the last
};

struct MassEstimate {
    double epsilon = 0.0;
    int hits = 0;
    int draws = 0;
    int failures = 0;  // draws whose KL evaluation failed (counted as misses)
    double fraction = 0.0;
    std::pair<double, double> wilson_interval{0.0, 0.0};
};

// 95% Wilson score interval for `hits` successes out of `draws`.
std::pair<double, double> wilson_interval(int hits, int draws);

// Per-draw outcome, for diagnostic CSV output.  `kl` is the value the
// hit/miss decision used (refined value when a re-evaluation was triggered,
// +inf for an infinite divergence, NaN when the draw failed).
struct DrawRecord {
    std::uint64_t draw = 0;
    double kl = 0.0;
    bool hit = false;
    bool failed = false;
};

// Stick-breaking draw from DP(concentration, base): weights
// v_k prod_{j<k} (1 - v_j) with v_j ~ Beta(1, c), atoms i.i.d. from the base
// measure, truncated at dp.truncation atoms with the remaining stick mass
// lumped onto the final atom.  The (seed, draw_index, lane) triple addresses
// a counter-based stream, so every draw is bit-reproducible; weights are
// generated before atoms.  Lane 1 is the mixing lane (lane 0 is reserved
// for hierarchical indexing).
MixingDistribution stick_breaking_sample(const DPSpec& dp, std::uint64_t seed,
                                         std::uint64_t draw_index = 0);

// Monte-Carlo estimate of the prior mass of the KL ball
// {f : K(f0; f) < epsilon} under mixtures of `kernel` with DP-distributed
// mixing.  Per draw: P ~ DP, optionally phi ~ hyper_prior (when the kernel
// takes a hyperparameter that the base atoms do not carry), then
// K(f0; f_{P,phi}) at coarse tolerance 1e-4; decisions within 10x the
// tolerance of epsilon are re-evaluated at 1e-7.  Failed or infinite
// divergences count as misses.  Draws run in parallel with per-draw
// streams, so the estimate is identical under any thread count.  When
// `per_draw` is given it is resized to n_draws and filled in draw order.
MassEstimate kl_mass_estimate(const DensitySpec& f0, const KernelSpec& kernel,
                              const DPSpec& dp,
                              const std::optional<BaseComponent>& hyper_prior,
                              double epsilon, int n_draws, std::uint64_t seed,
                              std::vector<DrawRecord>* per_draw = nullptr);

// Finite prior over the indexing parameter xi of a DP family.
struct XiPrior {
    std::vector<double> values;
    std::vector<double> probs;  // nonnegative, sum 1 (renormalized on use)
};

// Hierarchical variant: xi ~ XiPrior from the draw's lane-0 stream, then
// P | xi from the lane-1 stream exactly as kl_mass_estimate uses it, so a
// point-mass XiPrior reproduces kl_mass_estimate bit-for-bit.
MassEstimate hierarchical_mass_estimate(const XiPrior& xi_prior,
                                        const std::function<DPSpec(double)>& dp_family,
                                        const DensitySpec& f0, const KernelSpec& kernel,
                                        const std::optional<BaseComponent>& hyper_prior,
                                        double epsilon, int n_draws, std::uint64_t seed,
                                        std::vector<DrawRecord>* per_draw = nullptr);

}  // namespace klkit
