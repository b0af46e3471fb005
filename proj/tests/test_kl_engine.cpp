#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "klkit/approximants.hpp"
#include "klkit/densities.hpp"
#include "klkit/kl_engine.hpp"
#include "klkit/quadrature.hpp"

using namespace klkit;

namespace {
DensitySpec histogram_two_bins() {
    // histogram mixture (1/4, 3/4) as a plain density, for the analytic pair
    return density_from_table(Support::unit_interval, {0.0, 0.5, 1.0}, {{0.5}, {1.5}});
}
}  // namespace

TEST_CASE("analytic divergence pairs") {
    struct Pair {
        const char* label;
        DensitySpec f, g;
        double truth;
    };
    const Pair pairs[] = {
        {"normal vs itself", density_normal(), density_normal(), 0.0},
        {"normal mean shift", density_normal(), density_normal(1.0, 1.0), 0.5},
        {"normal scale 2", density_normal(), density_normal(0.0, 2.0),
         0.31814718055994531},
        {"exp 1 vs 2", density_exponential(1.0), density_exponential(2.0),
         0.30685281944005469},
        {"exp 2 vs 1", density_exponential(2.0), density_exponential(1.0),
         0.19314718055994531},
        {"uniform vs 2-bin histogram", density_uniform01(), histogram_two_bins(),
         0.14384103622589046},
        {"parabolic vs uniform", density_parabolic(), density_uniform01(),
         0.12509280256138833},
        {"gamma shape 3 vs 2", density_gamma(3.0, 1.0), density_gamma(2.0, 1.0),
         0.22963715453852183},
        {"laplace scale 2", density_laplace(0.0, 1.0), density_laplace(0.0, 2.0),
         0.19314718055994531},
        {"cauchy scale 2", density_cauchy(0.0, 1.0), density_cauchy(0.0, 2.0),
         0.11778303565638345},
        {"lognormal shift", density_lognormal(0.0, 1.0), density_lognormal(1.0, 1.0), 0.5},
        {"exp vs gamma(2,1)", density_exponential(1.0), density_gamma(2.0, 1.0),
         0.57721566490153286},
    };
    for (const auto& p : pairs) {
        CAPTURE(p.label);
        KLResult r = kl_divergence(p.f, p.g, 1e-10);
        CHECK(r.converged);
        CHECK_FALSE(r.infinite);
        CHECK(r.value == doctest::Approx(p.truth).epsilon(1e-8));
        CHECK(std::abs(r.value - p.truth) < 1e-6);  // the headline tolerance
        CHECK(r.abs_error_bound >= 0.0);
        CHECK(r.evaluations > 0);
    }
}

TEST_CASE("divergence against a mixture") {
    // uniform target vs its own histogram approximant: exactly zero
    MixtureDensity hist = histogram_approximant(density_uniform01(), 4);
    KLResult r = kl_divergence(density_uniform01(), hist, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-9));

    // uniform vs the (1/4, 3/4) two-bin histogram built by hand
    MixtureDensity two({KernelFamily::histogram},
                       MixingDistribution::discrete({{{0.25}, 0.25}, {{0.75}, 0.75}}),
                       {2.0});
    KLResult r2 = kl_divergence(density_uniform01(), two, 1e-10);
    CHECK(r2.value == doctest::Approx(0.14384103622589046).epsilon(1e-7));
}

TEST_CASE("log-transform preserves divergences on the half line") {
    const DensitySpec f = density_exponential(1.0);
    const DensitySpec g = density_gamma(2.0, 1.0);
    KLResult direct = kl_divergence(f, g, 1e-9);
    KLResult mapped = kl_divergence(log_transform(f), log_transform(g), 1e-9);
    CHECK(mapped.value == doctest::Approx(direct.value).epsilon(2e-8));

    KLResult ln_direct =
        kl_divergence(density_lognormal(0.0, 1.0), density_lognormal(0.5, 1.2), 1e-9);
    KLResult ln_mapped = kl_divergence(log_transform(density_lognormal(0.0, 1.0)),
                                       log_transform(density_lognormal(0.5, 1.2)), 1e-9);
    CHECK(ln_mapped.value == doctest::Approx(ln_direct.value).epsilon(2e-8));
}

TEST_CASE("infinite divergence is a verdict, not an exception") {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    LogDensity log_f = [](double x) { return -0.5 * x * x - 0.91893853320467274; };
    LogDensity log_g = [neg_inf](double x) {
        return (x >= -1.0 && x <= 1.0) ? std::log(0.5) : neg_inf;
    };
    KLResult r = kl_divergence(log_f, log_g, neg_inf,
                               std::numeric_limits<double>::infinity(), 1e-8);
    CHECK(r.infinite);

    // same-support guard on the spec overloads
    CHECK_THROWS_AS(kl_divergence(density_normal(), density_uniform01()),
                    std::invalid_argument);
    CHECK_THROWS_AS(kl_divergence(density_normal(), density_normal(), 0.0),
                    std::invalid_argument);
}

TEST_CASE("result diagnostics") {
    KLResult r = kl_divergence(density_normal(), density_normal(0.5, 1.0), 1e-9);
    CHECK_FALSE(r.split_points.empty());
    CHECK(r.tail_contribution < 1e-6);
    CHECK(r.abs_error_bound < 1e-7);
    // repeatable bit for bit
    KLResult r2 = kl_divergence(density_normal(), density_normal(0.5, 1.0), 1e-9);
    CHECK(r.value == r2.value);
    CHECK(r.evaluations == r2.evaluations);
}

TEST_CASE("floor transform") {
    auto [f1_uniform, c_uniform] = floor_transform(density_uniform01(), 0.5);
    CHECK(c_uniform == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f1_uniform.pdf(0.3) == doctest::Approx(1.0).epsilon(1e-10));

    auto [f1, c] = floor_transform(density_parabolic(), 0.5);
    CHECK(c == doctest::Approx(1.0443310539518174).epsilon(1e-6));
    // floored density dominates floor/c and keeps unit mass
    for (int i = 0; i <= 50; ++i) {
        double x = i / 50.0;
        CHECK(f1.pdf(x) >= 0.5 / c - 1e-12);
    }
    CHECK(integrate(f1.pdf, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-7));

    // c -> 1 as the floor vanishes
    double prev = 2.0;
    for (double m : {0.1, 0.01, 0.001}) {
        double ci = floor_transform(density_parabolic(), m).second;
        CHECK(ci < prev);
        CHECK(ci >= 1.0);
        prev = ci;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));

    CHECK_THROWS_AS(floor_transform(density_normal(), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(floor_transform(density_uniform01(), 0.0), std::invalid_argument);
}

TEST_CASE("floored-divergence inequality on three target/approximant pairs") {
    // uniform target, uniform comparison
    Lemma4Bound a = lemma4_bound_check(density_uniform01(), density_uniform01(), 0.5);
    CHECK(a.verdict == Verdict::pass);
    CHECK(a.lhs == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.c == doctest::Approx(1.0).epsilon(1e-10));

    // parabolic target, uniform comparison
    Lemma4Bound b = lemma4_bound_check(density_parabolic(), density_uniform01(), 0.5);
    CHECK(b.verdict == Verdict::pass);
    CHECK(b.lhs <= b.rhs + b.error_budget);
    CHECK(b.c > 1.0);

    // parabolic target, bernstein approximant comparison
    MixtureDensity fk = bernstein_approximant(density_parabolic(), 10);
    Lemma4Bound d = lemma4_bound_check(density_parabolic(), fk, 0.1);
    CHECK(d.verdict == Verdict::pass);
    CHECK(d.lhs <= d.rhs + d.error_budget);
}

TEST_CASE("convergence studies") {
    // histogram of the uniform: identically zero at every index
    auto hist = make_sequence(ApproximantFamily::histogram, density_uniform01());
    int ladder[] = {2, 4, 8};
    StudyTable t = convergence_study(hist, ladder, 0.01, 1e-9);
    REQUIRE(t.rows.size() == 3);
    for (const auto& row : t.rows) {
        CHECK(row.kl.value == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(row.runtime_ms >= 0.0);
    }
    CHECK(t.converged);

    // normal target under the normal location-scale sequence
    auto ls = make_sequence(ApproximantFamily::location_scale, density_normal(),
                            KernelSpec{KernelFamily::skew_normal, 0.0}, 0.5);
    int ladder2[] = {4, 16, 64};
    StudyTable t2 = convergence_study(ls, ladder2, 0.01, 1e-8);
    REQUIRE(t2.rows.size() == 3);
    CHECK(t2.rows.back().kl.value < 0.01);
    CHECK(t2.converged);

    // rows carry their index in ladder order
    CHECK(t2.rows[0].index == 4);
    CHECK(t2.rows[2].index == 64);

    // an over-ambitious target is reported as not converged
    StudyTable t3 = convergence_study(ls, ladder2, 1e-9, 1e-8);
    CHECK_FALSE(t3.converged);
}
