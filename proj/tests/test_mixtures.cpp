#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "klkit/approximants.hpp"
#include "klkit/densities.hpp"
#include "klkit/kernels.hpp"
#include "klkit/mixtures.hpp"
#include "klkit/quadrature.hpp"

using namespace klkit;

namespace {
MixingDistribution uniform_histogram_mixing(int m) {
    std::vector<MixingAtom> atoms;
    for (int i = 1; i <= m; ++i)
        atoms.push_back({{(i - 0.5) / m}, 1.0 / m});
    return MixingDistribution::discrete(std::move(atoms));
}
}  // namespace

TEST_CASE("discrete mixtures evaluate as plain weighted sums") {
    // equal-weight histogram atoms reproduce the uniform density
    MixtureDensity fp({KernelFamily::histogram}, uniform_histogram_mixing(4), {4.0});
    CHECK(fp(0.6) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fp(0.1) == doctest::Approx(1.0).epsilon(1e-14));

    // point mass: the mixture is the kernel itself
    MixtureDensity pm({KernelFamily::exponential},
                      MixingDistribution::discrete({{{2.0}, 1.0}}));
    CHECK(pm(0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pm(1.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("discrete evaluation is bitwise the left-to-right atom sum") {
    KernelSpec sn{KernelFamily::skew_normal, 0.7};
    std::vector<MixingAtom> atoms;
    for (int i = 0; i < 9; ++i)
        atoms.push_back({{-2.0 + 0.5 * i}, (i + 1) / 45.0});
    MixtureDensity fp(sn, MixingDistribution::discrete(atoms), {0.8});
    for (double x : {-3.0, -0.4, 0.0, 1.3, 2.9}) {
        double by_hand = 0.0;
        for (const auto& a : atoms)
            by_hand += a.weight * kernel_eval(sn, x, a.theta, fp.phi());
        CHECK(fp(x) == by_hand);  // identical summation order -> identical bits
    }
}

TEST_CASE("atoms may carry their own trailing bandwidth parameters") {
    KernelSpec sn{KernelFamily::skew_normal, 0.0};
    // theta = {location, h}: no shared phi on the mixture
    std::vector<MixingAtom> atoms{{{-1.0, 0.5}, 0.25}, {{0.0, 1.0}, 0.5}, {{1.5, 2.0}, 0.25}};
    MixtureDensity fp(sn, MixingDistribution::discrete(atoms));
    double x = 0.3, by_hand = 0.0;
    for (const auto& a : atoms) {
        std::vector<double> th{a.theta[0]}, ph{a.theta[1]};
        by_hand += a.weight * kernel_eval(sn, x, th, ph);
    }
    CHECK(fp(x) == doctest::Approx(by_hand).epsilon(1e-15));
    CHECK(integrate_real_line([&](double t) { return fp(t); }).value ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mixture mass and log_eval consistency") {
    KernelSpec sn{KernelFamily::skew_normal, 0.0};
    std::vector<MixingAtom> atoms{{{-1.0}, 0.3}, {{2.0}, 0.7}};
    MixtureDensity fp(sn, MixingDistribution::discrete(atoms), {0.6});
    CHECK(fp.weight_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate_real_line([&](double x) { return fp(x); }).value ==
          doctest::Approx(1.0).epsilon(1e-8));
    for (double x : {-4.0, -1.0, 0.2, 2.0, 5.0})
        CHECK(fp.log_eval(x) == doctest::Approx(std::log(fp(x))).epsilon(1e-12));

    // outside the sample space the mixture vanishes
    MixtureDensity hist({KernelFamily::histogram}, uniform_histogram_mixing(3), {3.0});
    CHECK(hist(1.5) == 0.0);
    CHECK(hist.log_eval(1.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("density-kind mixing integrates the kernel against the mixing pdf") {
    // gamma-kernel sequence member: f_20 at x=1 tracks Exp(1)
    MixtureDensity fm = gamma_eq15_approximant(density_exponential(1.0), 20);
    CHECK(fm.mixing().kind() == MixingDistribution::Kind::density);
    CHECK(fm(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(0.05));

    // the quadrature path must agree with a straightforward fine-grid sum
    const MixingDensity& md = fm.mixing().density_part();
    const int n = 40000;
    double riemann = 0.0;
    const double dx = (md.hi - md.lo) / n;
    for (int i = 0; i < n; ++i) {
        double v = md.lo + (i + 0.5) * dx;
        riemann += md.pdf(v) * kernel_eval(fm.kernel(), 1.0, md.theta_of(v), fm.phi());
    }
    riemann *= dx;
    CHECK(fm(1.0) == doctest::Approx(riemann).epsilon(1e-6));
}

TEST_CASE("mixing distribution validation") {
    KernelSpec ex{KernelFamily::exponential};
    // negative atom weights are rejected when the mixture is assembled
    CHECK_THROWS_AS(
        MixtureDensity(ex, MixingDistribution::discrete({{{1.0}, -0.5}, {{2.0}, 1.5}})),
        std::invalid_argument);
    // weights need not sum to one (sub-probability mixing is allowed)
    CHECK_NOTHROW(MixtureDensity(ex, MixingDistribution::discrete({{{1.0}, 0.5}})));

    MixingDensity bad;
    bad.lo = 1.0;
    bad.hi = 0.0;
    bad.pdf = [](double) { return 1.0; };
    bad.theta_of = [](double v) { return std::vector<double>{v}; };
    CHECK_THROWS_AS(MixingDistribution::density(bad), std::invalid_argument);

    MixingDensity no_map;
    no_map.lo = 0.0;
    no_map.hi = 1.0;
    no_map.pdf = [](double) { return 1.0; };
    CHECK_THROWS_AS(MixingDistribution::density(no_map), std::invalid_argument);
}

TEST_CASE("atom arity mismatches are rejected at assembly") {
    KernelSpec g{KernelFamily::gamma};  // needs theta = {shape, scale}
    CHECK_THROWS_AS(MixtureDensity(g, MixingDistribution::discrete({{{2.0}, 1.0}})),
                    std::invalid_argument);
    // shared phi present: atoms carry theta alone
    KernelSpec sn{KernelFamily::skew_normal, 0.0};
    CHECK_THROWS_AS(
        MixtureDensity(sn, MixingDistribution::discrete({{{0.0, 1.0}, 1.0}}), {1.0}),
        std::invalid_argument);
}

TEST_CASE("fast_eval, when installed, agrees with the generic path") {
    const DensitySpec f0 = density_exponential(1.0);
    MixtureDensity fm = scaled_uniform_approximant(f0, 40);
    REQUIRE(static_cast<bool>(fm.fast_eval));
    for (double x : {0.05, 0.3, 1.0, 2.7, 5.0}) {
        double generic = 0.0;
        for (const auto& a : fm.mixing().atoms())
            generic += a.weight * kernel_eval(fm.kernel(), x, a.theta, fm.phi());
        CHECK(fm(x) == doctest::Approx(generic).epsilon(1e-12));
        CHECK(fm.fast_eval(x) == doctest::Approx(generic).epsilon(1e-12));
    }
}

TEST_CASE("span overload matches the scalar overload in one dimension") {
    MixtureDensity fp({KernelFamily::skew_normal, 0.0},
                      MixingDistribution::discrete({{{0.0}, 1.0}}), {1.0});
    double xs[1] = {0.4};
    CHECK(fp(std::span<const double>(xs, 1)) == fp(0.4));
}
