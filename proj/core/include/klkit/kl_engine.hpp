#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "klkit/approximants.hpp"
#include "klkit/conditions.hpp"
#include "klkit/densities.hpp"
#include "klkit/mixtures.hpp"

namespace klkit {

struct KLResult {
    double value = 0.0;            // nats
    double abs_error_bound = 0.0;
    // Final quadrature panel boundaries, mapped back to the x axis.
    std::vector<double> split_points;
    // Integral mass beyond the outermost seeded abscissae (|x| of order 1e2
    // on unbounded supports); 0 on bounded supports.
    double tail_contribution = 0.0;
    bool infinite = false;  // second density underflows where the first has mass
    bool converged = false;
    long evaluations = 0;
};

using LogDensity = std::function<double(double)>;

// K(f; g) = integral of f ln(f/g) over (lo, hi); either bound may be
// infinite.  The integrand runs through the log evaluators, panels are
// seeded at sign changes of ln f - ln g (129-point scan plus bisection),
// and unbounded supports go through the rational map x = t/(1 - t^2).
// When g underflows (below 1e-300) at nodes where f > 1e-12 in three or
// more leaf panels, the result is the infinite-KL verdict rather than a
// number.  Any other failure to reach `tol` throws QuadratureError with
// the residual.  Extra `seeds` are x-space subdivision hints.
KLResult kl_divergence(const LogDensity& log_f, const LogDensity& log_g,
                       double lo, double hi, double tol = 1e-8,
                       std::span<const double> seeds = {});

// Same-support convenience overloads (throw std::invalid_argument when the
// supports disagree).  Seeds default to the core interval of f.
KLResult kl_divergence(const DensitySpec& f, const DensitySpec& g, double tol = 1e-8);
KLResult kl_divergence(const DensitySpec& f, const MixtureDensity& g, double tol = 1e-8);

// max(f0, floor) renormalized to unit mass on [0, 1]; second element is the
// normalizer c = integral of max(f0, floor), c >= 1.
std::pair<DensitySpec, double> floor_transform(const DensitySpec& f0, double floor);

// Checks K(f0; f) <= (c+1) ln c + K(f1; f) + sqrt(K(f1; f)) where f1 is the
// floored-renormalized f0.  Verdict is indeterminate when either divergence
// comes back infinite; otherwise pass iff lhs <= rhs + error budget.
struct Lemma4Bound {
    double lhs = 0.0;
    double rhs = 0.0;
    double c = 1.0;
    double error_budget = 0.0;  // 2 * (sum of quadrature error bounds)
    Verdict verdict = Verdict::indeterminate;
};
Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const LogDensity& log_f, double m);
Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const DensitySpec& f, double m);
Lemma4Bound lemma4_bound_check(const DensitySpec& f0, const MixtureDensity& f, double m);

// K(f0; seq.at(index)) along an index ladder.  Infinite-KL entries are kept
// and flagged; rows run concurrently (results independent of scheduling).
struct StudyRow {
    int index = 0;
    KLResult kl;
    double runtime_ms = 0.0;
};

struct StudyTable {
    std::vector<StudyRow> rows;
    double eps_target = 0.01;
    // final value < eps_target and the last three values non-increasing
    // within their error bounds
    bool converged = false;
};

StudyTable convergence_study(const ApproximantSequence& seq, std::span<const int> ladder,
                             double eps_target = 0.01, double tol = 1e-8);

}  // namespace klkit
