#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klkit/densities.hpp"
#include "klkit/kernels.hpp"
#include "klkit/mixtures.hpp"

namespace klkit {

enum class Verdict { pass, fail, indeterminate };

const char* verdict_name(Verdict v);

struct ConditionItem {
    std::string tag;     // "B3", "moment", "A8", ...
    Verdict verdict = Verdict::indeterminate;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string detail;  // human-readable evidence, incl. witnesses on fail
};

struct ConditionReport {
    std::string subject;  // "theorem_14", "location_scale", ...
    std::vector<ConditionItem> items;
    double l1 = std::numeric_limits<double>::quiet_NaN();
    double l2 = std::numeric_limits<double>::quiet_NaN();
    double eta_used = std::numeric_limits<double>::quiet_NaN();
    double delta_used = std::numeric_limits<double>::quiet_NaN();

    Verdict overall() const;  // pass iff all pass; fail beats indeterminate
    bool all_pass() const { return overall() == Verdict::pass; }
    const ConditionItem* find(const std::string& tag) const;
};

// Weight functions for the integrability checks.  The parameter is p for
// abs_power, eta for exp_log_power/minmax_power, delta for local_ratio,
// and unused otherwise.
enum class WeightKind {
    abs_power,      // |x|^p
    log_plus_abs,   // log_+ |x|
    exp_log_power,  // exp(2 |log x|^{1+eta})
    minmax_power,   // max(x^{-eta-2}, x^{eta+2})
    entropy,        // |log f0(x)|
    local_ratio,    // log(f0(x) / phi_delta(x))
};

struct MomentCheck {
    double value = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::indeterminate;
    double tail_slope = std::numeric_limits<double>::quiet_NaN();
    double truncation = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

// Certify that integral(f0 * w) is finite, where the weight is supplied
// as log w (so weights like exp(2|log x|^{1+eta}) cannot overflow before
// they meet the density).  The integrand is quadratured up to a truncation
// point and the remainder certified by a log-log slope fit on [T, 2T]
// (slope < -1 - margin passes; > -1 + margin at the search limit fails;
// otherwise indeterminate).  Endpoint singularities of bounded supports
// get the mirrored treatment on shrinking windows.
MomentCheck certify_integral(const DensitySpec& f0,
                             const std::function<double(double)>& log_weight,
                             double quad_tol = 1e-7);

MomentCheck check_moment(const DensitySpec& f0, WeightKind kind,
                         double param = 0.0,
                         PhiDeltaVariant variant = PhiDeltaVariant::two_sided);

struct ConditionOptions {
    double search_radius = 100.0;             // for l1, l2
    std::vector<double> etas{0.25, 0.5, 1.0};
    std::vector<double> deltas{0.5, 0.1, 0.02};
    bool b8_declared = true;  // weak-support declaration from configuration
};

// Location-scale hypotheses: base density shape (grid checks and the two
// radii), plus the f0 integrability conditions.
ConditionReport check_location_scale(const DensitySpec& f0,
                                     const LocationScaleView& view,
                                     const ConditionOptions& opt = {});

struct MonotoneReport {
    Verdict verdict = Verdict::indeterminate;
    double witness_x = std::numeric_limits<double>::quiet_NaN();
    int witness_order = -1;
    double witness_value = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

// Falsification test for complete monotonicity of the survival function:
// checks (-1)^n * (n-th forward difference) >= -tol on a log-spaced grid.
MonotoneReport check_completely_monotone(const DensitySpec& f0,
                                         int max_order = 6,
                                         int grid_points = 64);

// Hypothesis list of one of the per-kernel results (ids 4..17; 2 and 3
// alias the generic location-scale list).
ConditionReport check_theorem(int theorem_id, const DensitySpec& f0,
                              const KernelSpec& kernel,
                              const ConditionOptions& opt = {});

// Compact box D in parameter space: per-theta-coordinate ranges plus an
// optional scale/hyper range.
struct CompactBox {
    std::vector<std::pair<double, double>> theta_ranges;
    std::optional<std::pair<double, double>> phi_range;
};

ConditionReport check_A_conditions(
    const DensitySpec& f0, const KernelSpec& kernel,
    const MixtureDensity& f_p_eps, double phi_eps, const CompactBox& D,
    std::optional<std::pair<double, double>> C = std::nullopt);

}  // namespace klkit
