#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "klkit/densities.hpp"
#include "klkit/kernels.hpp"
#include "klkit/mixtures.hpp"

namespace klkit {

enum class ApproximantFamily {
    location_scale,
    histogram,
    triangular,
    bernstein,
    gamma_eq15,
    inverse_gamma,
    exponential_truncated,
    scaled_uniform,
};

const char* approximant_family_name(ApproximantFamily family);
std::optional<ApproximantFamily> approximant_family_from_name(std::string_view name);

// ---- constructive approximating mixtures -------------------------------
//
// Each builder returns the m-th member of a sequence f_m whose KL distance
// to f0 vanishes as the index grows.  The mixing distributions are exactly
// the compactly supported measures used in the corresponding existence
// proofs, so the outputs double as test fixtures for the condition checks.

// Bandwidth-h_m location mixture: mixing density t_m f0 on [-m, m] with
// t_m = 1 / integral_{|t|<m} f0 and shared bandwidth h_m = m^{-eta}.
// `kernel` must be one of the location-scale families (skew_normal with
// lambda=0 gives the plain normal base).  Univariate only.
MixtureDensity location_scale_approximant(const DensitySpec& f0,
                                          const KernelSpec& kernel, int m,
                                          double eta);

// Bin-average weights w_i proportional to f0((i-1)/m) + f0(i/m), i = 1..m.
std::vector<double> histogram_weights(const DensitySpec& f0, int m);
MixtureDensity histogram_approximant(const DensitySpec& f0, int m);

// Node weights w_i = f0(i/n) / sum_j f0(j/n), i = 0..n (n+1 entries).
std::vector<double> triangular_weights(const DensitySpec& f0, int n);
MixtureDensity triangular_approximant(const DensitySpec& f0, int n);

// CDF-increment weights w_j = F0((j+1)/(k+1)) - F0(j/(k+1)) on the degree-k
// Bernstein basis; falls back to panel quadrature when f0 has no CDF.
MixtureDensity bernstein_approximant(const DensitySpec& f0, int k);

// Gamma-kernel mixture at scale 1/m: mixing density over the shape
// alpha in [2, 1+m^2] proportional to f0((alpha-1)/m), normalized by
// t_m = 1 / integral_{1/m}^{m} f0.  Evaluation subdivides at the kernel's
// alpha-mode (the digamma equation) so the quadrature sees the peak.
MixtureDensity gamma_eq15_approximant(const DensitySpec& f0, int m);

// Inverse-gamma kernel K(x; k, z) = h(x; k, kz) at shape k = m, mixing
// density t_m f0(z) on z in [1/m, m].
MixtureDensity inverse_gamma_approximant(const DensitySpec& f0, int m);

// Renormalized restriction of p0 to [1/a, a], mixed with theta e^{-theta x}.
// Throws if the truncated mass is zero.
MixtureDensity exponential_truncation(const MixingDistribution& p0, double a);

// Bracket points for the scaled-uniform weight table: a = f0(x1) close to
// f0(0+) (proxy f0(1e-6), factor 0.9) and b = f0(x2) = 0.01, found by
// bisection along the decreasing density.
struct ScaledUniformBrackets {
    double x1 = 0.0;
    double x2 = 0.0;
    double a = 0.0;  // f0(x1)
    double b = 0.0;  // f0(x2)
};
ScaledUniformBrackets scaled_uniform_brackets(const DensitySpec& f0);

// Difference weights on atoms theta_i = i/m (entry [0] is atom i = 1) with
// the bracket-row substitutions at i = m1, m1+1 and the mid-range
// renormalization; the infinite ladder is truncated once the remaining
// mass bound drops below 1e-12.  Throws if f0 increases along the grid.
std::vector<double> scaled_uniform_weights(const DensitySpec& f0, int m,
                                           double x1, double x2);
MixtureDensity scaled_uniform_approximant(const DensitySpec& f0, int m,
                                          double x1, double x2);
MixtureDensity scaled_uniform_approximant(const DensitySpec& f0, int m);

// ---- indexed sequences --------------------------------------------------

struct ApproximantSequence {
    ApproximantFamily family = ApproximantFamily::location_scale;
    DensitySpec f0;
    KernelSpec kernel;    // consulted by location_scale only
    double eta = 0.5;     // location_scale bandwidth exponent
    std::function<MixtureDensity(int)> build;

    MixtureDensity at(int index) const;
};

// Wires the family's builder to (f0, kernel, eta).  `kernel` is required
// only for location_scale (defaults to the plain normal base).  For
// exponential_truncated the mixing base measure must be recoverable from
// f0: the built-in "pareto" density (base Gamma(2,1)) is supported, other
// densities throw; use make_exponential_sequence to supply the measure.
ApproximantSequence make_sequence(ApproximantFamily family, const DensitySpec& f0,
                                  std::optional<KernelSpec> kernel = std::nullopt,
                                  double eta = 0.5);
ApproximantSequence make_exponential_sequence(const MixingDistribution& p0,
                                              const DensitySpec& f0);

// ---- lower-bound verification ------------------------------------------

struct BoundPoint {
    double x = 0.0;
    double value = 0.0;    // f_m(x)
    double floor = 0.0;    // the proof's lower bound at x (NaN when skipped)
    std::string bound;     // which floor branch applied ("small_x", "window", "large_x")
    bool skipped = false;  // x outside every floor's validity range for this m
    bool violated = false;
    std::string note;
};

struct BoundReport {
    ApproximantFamily family = ApproximantFamily::gamma_eq15;
    int m = 0;
    double delta = 0.25;
    std::vector<BoundPoint> points;

    int violations() const;
    int skips() const;
};

// Checks f_m(x) >= floor(x) at each grid point against the piecewise floors
// stated for the gamma and inverse-gamma constructions (window floor
// C(x) phi_delta(x) in the middle range, closed-form tails outside).
// Points outside a floor's validity range are skipped with a note.
// Relative tolerance 1e-9.
BoundReport verify_lower_bounds(const ApproximantSequence& seq, int m,
                                std::span<const double> grid, double delta = 0.25);

// Window-mass diagnostics for the gamma kernel at scale 1/m, used to
// validate the approximation-to-identity behaviour and the closed-form
// window envelope:
//   c1       = integral over v in [1/m, m] of K_m(x; m v + 1) dv   (-> 1)
//   c2       = the part of c1 at least delta away from x           (-> 0)
//   window   = the one-sided window integral that the envelope bounds
//   envelope = lemma8_envelope(x, delta)  (must be <= window)
struct GammaKernelMass {
    double c1 = 0.0;
    double c2 = 0.0;
    double window = 0.0;
    double envelope = 0.0;
};
GammaKernelMass gamma_kernel_mass(int m, double x, double delta);

}  // namespace klkit
