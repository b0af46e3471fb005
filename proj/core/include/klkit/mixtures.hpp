#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "klkit/kernels.hpp"
#include "klkit/quadrature.hpp"

namespace klkit {

// One atom of a discrete mixing distribution.  `theta` holds the kernel's
// location parameters followed by any per-atom bandwidth-type parameters,
// i.e. the concatenation (theta | phi_atom) split by theta_arity at eval
// time when the mixture carries no shared hyperparameter vector.
struct MixingAtom {
    std::vector<double> theta;
    double weight = 0.0;
};

// Continuous mixing distribution over a scalar parameter v.  `theta_of`
// maps v to the full kernel parameter vector; `pdf` is the mixing density
// on [lo, hi] (need not be normalized if `weight` scales it).
struct MixingDensity {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> pdf;
    std::function<std::vector<double>(double)> theta_of;
    double weight = 1.0;  // total mass carried by this component
};

class MixingDistribution {
public:
    enum class Kind { discrete, density };

    static MixingDistribution discrete(std::vector<MixingAtom> atoms);
    static MixingDistribution density(MixingDensity d);

    Kind kind() const { return kind_; }
    const std::vector<MixingAtom>& atoms() const { return atoms_; }
    const MixingDensity& density_part() const { return density_; }

    double total_weight() const;

private:
    Kind kind_ = Kind::discrete;
    std::vector<MixingAtom> atoms_;
    MixingDensity density_;
};

// Kernel mixture f_P(x) = sum_j w_j K(x; theta_j, phi)  or
//                f_P(x) = integral K(x; theta(v), phi) p(v) dv.
//
// For discrete mixing the evaluation is a plain left-to-right weighted sum
// so that results are bit-identical to a hand-rolled loop over the atoms.
class MixtureDensity {
public:
    MixtureDensity(KernelSpec kernel, MixingDistribution mixing,
                   std::vector<double> phi = {});

    double operator()(double x) const;
    double operator()(std::span<const double> x) const;
    double log_eval(double x) const;
    double log_eval(std::span<const double> x) const;

    const KernelSpec& kernel() const { return kernel_; }
    const MixingDistribution& mixing() const { return mixing_; }
    const std::vector<double>& phi() const { return phi_; }

    // Total mixing mass (sum of weights / density component weight).
    double weight_mass() const { return mixing_.total_weight(); }

    // Upper bound sup_x f_P(x) when one is known (set by constructors of
    // specific approximants); used by condition checks.
    std::optional<double> upper_bound;

    // Direct evaluator bypassing the generic sum/quadrature path.  Set by
    // approximant builders when a closed form exists (histogram bin lookup,
    // scaled-uniform suffix sums).  Must agree with the generic path.
    std::function<double(double)> fast_eval;

    // Hint generator for the continuous-mixing quadrature: subdivision
    // points in v for a given x (e.g. the location of the kernel mode).
    std::function<std::vector<double>(double)> quad_hints;

    // Quadrature control for density-kind mixing.
    QuadOptions quad_options{1e-12, 1e-8, 40, 20000};

private:
    double eval_discrete(std::span<const double> x) const;
    double log_eval_discrete(std::span<const double> x) const;
    double eval_density(double x) const;

    KernelSpec kernel_;
    MixingDistribution mixing_;
    std::vector<double> phi_;
};

}  // namespace klkit
