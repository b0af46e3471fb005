#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "klkit/approximants.hpp"
#include "klkit/densities.hpp"
#include "klkit/quadrature.hpp"
#include "klkit/special_fn.hpp"

using namespace klkit;

namespace {
double mixture_mass(const MixtureDensity& fm, Support s) {
    auto f = [&](double x) { return fm(x); };
    QuadOptions opt{1e-9, 0.0, 40, 40000};
    switch (s) {
        case Support::unit_interval: return integrate(f, 0.0, 1.0, opt).value;
        case Support::positive_half_line: return integrate_half_line(f, 0.0, opt).value;
        case Support::real_line: return integrate_real_line(f, opt).value;
    }
    return 0.0;
}
}  // namespace

TEST_CASE("location-scale approximant: truncation normalizer and bound") {
    const DensitySpec f0 = density_normal();
    KernelSpec base{KernelFamily::skew_normal, 0.0};
    MixtureDensity f1 = location_scale_approximant(f0, base, 1, 0.5);

    // t_1 = 1 / P(|Z| < 1)
    const double t1 = 1.4647947734915441;
    const MixingDensity& md = f1.mixing().density_part();
    CHECK(md.lo == doctest::Approx(-1.0));
    CHECK(md.hi == doctest::Approx(1.0));
    CHECK(md.pdf(0.0) == doctest::Approx(t1 * f0.pdf(0.0)).epsilon(1e-9));

    // f_m is bounded by sup(chi) * t_m / h_m with h_1 = 1
    REQUIRE(f1.upper_bound.has_value());
    for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(f1(x) <= *f1.upper_bound * (1.0 + 1e-9));
    CHECK(mixture_mass(f1, Support::real_line) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("location-scale approximant converges at the mode") {
    const DensitySpec f0 = density_normal();
    KernelSpec base{KernelFamily::skew_normal, 0.0};
    const double target = f0.pdf(0.0);
    double prev_err = 1e9;
    int worse = 0;
    for (int m : {2, 4, 8, 16}) {
        MixtureDensity fm = location_scale_approximant(f0, base, m, 0.5);
        double err = std::abs(fm(0.0) - target);
        if (err > prev_err) ++worse;
        prev_err = err;
    }
    CHECK(worse <= 1);
    CHECK(prev_err < 0.02);
}

TEST_CASE("histogram approximant weights") {
    // uniform target: every bin weight is 1/m
    std::vector<double> wu = histogram_weights(density_uniform01(), 4);
    REQUIRE(wu.size() == 4);
    for (double w : wu) CHECK(w == doctest::Approx(0.25).epsilon(1e-12));

    // ramp 2x with two bins: endpoint-average rule gives (1/4, 3/4)
    DensitySpec ramp = density_from_table(Support::unit_interval, {0.0, 1.0}, {{0.0, 2.0}});
    std::vector<double> wr = histogram_weights(ramp, 2);
    REQUIRE(wr.size() == 2);
    CHECK(wr[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(wr[1] == doctest::Approx(0.75).epsilon(1e-12));

    // histogram mixture of the uniform is the uniform
    MixtureDensity fm = histogram_approximant(density_uniform01(), 8);
    CHECK(fm(0.37) == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("sup-norm error decreases along the ladder") {
        const DensitySpec p = density_parabolic();
        double prev = 1e9;
        for (int m : {8, 32, 128}) {
            MixtureDensity f = histogram_approximant(p, m);
            double sup = 0.0;
            for (int i = 1; i < 200; ++i) {
                double x = i / 200.0;
                sup = std::max(sup, std::abs(f(x) - p.pdf(x)));
            }
            CHECK(sup < prev);
            prev = sup;
        }
        CHECK(prev < 0.05);
    }
}

TEST_CASE("triangular approximant weights") {
    // uniform target at n=3: four equal node weights
    std::vector<double> w = triangular_weights(density_uniform01(), 3);
    REQUIRE(w.size() == 4);
    for (double wi : w) CHECK(wi == doctest::Approx(0.25).epsilon(1e-12));

    std::vector<double> wp = triangular_weights(density_parabolic(), 10);
    double total = 0.0;
    for (double wi : wp) {
        CHECK(wi >= 0.0);
        total += wi;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    const DensitySpec p = density_parabolic();
    double prev = 1e9;
    for (int n : {8, 32, 128}) {
        MixtureDensity f = triangular_approximant(p, n);
        double err = std::abs(f(0.5) - p.pdf(0.5));
        CHECK(err < prev + 1e-12);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("bernstein approximant") {
    // the uniform is reproduced exactly at every degree
    for (int k : {1, 4, 9}) {
        MixtureDensity f = bernstein_approximant(density_uniform01(), k);
        for (double x : {0.1, 0.5, 0.85})
            CHECK(f(x) == doctest::Approx(1.0).epsilon(1e-10));
    }

    MixtureDensity f10 = bernstein_approximant(density_parabolic(), 10);
    CHECK(mixture_mass(f10, Support::unit_interval) == doctest::Approx(1.0).epsilon(1e-8));

    double prev = 1e9;
    for (int k : {5, 20, 80}) {
        MixtureDensity f = bernstein_approximant(density_parabolic(), k);
        double sup = 0.0;
        for (int i = 0; i <= 100; ++i) {
            double x = i / 100.0;
            sup = std::max(sup, std::abs(f(x) - density_parabolic().pdf(x)));
        }
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("gamma-kernel approximant at scale 1/m") {
    const DensitySpec f0 = density_exponential(1.0);

    // normalizer at m=2: mixing pdf is t_m f0((alpha-1)/m) / m on the alpha axis
    MixtureDensity f2 = gamma_eq15_approximant(f0, 2);
    const MixingDensity& md = f2.mixing().density_part();
    const double t2 = 2.1222619107148440;
    const double alpha = 2.0;  // inside [2, 1+m^2]
    const double implied = md.pdf(alpha) / (f0.pdf((alpha - 1.0) / 2.0) / 2.0);
    CHECK(implied == doctest::Approx(t2).epsilon(1e-9));

    MixtureDensity f10 = gamma_eq15_approximant(f0, 10);
    CHECK(mixture_mass(f10, Support::positive_half_line) == doctest::Approx(1.0).epsilon(1e-6));

    double prev = 1e9;
    for (int m : {20, 80}) {
        MixtureDensity fm = gamma_eq15_approximant(f0, m);
        double err = std::abs(fm(1.0) - std::exp(-1.0));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.02);

    CHECK_THROWS_AS(gamma_eq15_approximant(density_normal(), 10), std::invalid_argument);
    CHECK_THROWS_AS(gamma_eq15_approximant(f0, 1), std::invalid_argument);
}

TEST_CASE("inverse-gamma approximant") {
    const DensitySpec f0 = density_gamma(2.0, 1.0);
    MixtureDensity f10 = inverse_gamma_approximant(f0, 10);
    CHECK(mixture_mass(f10, Support::positive_half_line) == doctest::Approx(1.0).epsilon(1e-6));

    double prev = 1e9;
    for (int m : {10, 40, 160}) {
        MixtureDensity fm = inverse_gamma_approximant(f0, m);
        double err = std::abs(fm(1.0) - f0.pdf(1.0));
        CHECK(err < prev + 1e-12);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("exponential truncation of a mixing measure") {
    // point mass at rate 1, any truncation: the mixture is Exp(1) exactly
    MixingDistribution pm = MixingDistribution::discrete({{{1.0}, 1.0}});
    for (double a : {2.0, 8.0}) {
        MixtureDensity f = exponential_truncation(pm, a);
        for (double x : {0.0, 0.5, 2.0})
            CHECK(f(x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }

    // Gamma(2,1) mixing over the rate gives the 2(1+x)^-3 mixture in the
    // untruncated limit; the truncated sequence recovers it at x = 1
    const DensitySpec pareto = density_pareto();
    MixingDensity g;
    g.lo = 0.0;
    g.hi = 60.0;
    g.pdf = [](double t) { return t * std::exp(-t); };
    g.theta_of = [](double t) { return std::vector<double>{t}; };
    MixingDistribution p0 = MixingDistribution::density(g);
    double prev = 1e9;
    for (double a : {2.0, 4.0, 16.0}) {
        MixtureDensity fa = exponential_truncation(p0, a);
        double err = std::abs(fa(1.0) - pareto.pdf(1.0));
        CHECK(err < prev + 1e-12);
        prev = err;
    }
    CHECK(prev < 1e-3);

    CHECK_THROWS_AS(exponential_truncation(pm, 0.5), std::invalid_argument);
}

TEST_CASE("scaled-uniform brackets and weights") {
    const DensitySpec f0 = density_exponential(1.0);
    ScaledUniformBrackets br = scaled_uniform_brackets(f0);
    CHECK(br.a == doctest::Approx(0.9 * f0.pdf(1e-6)).epsilon(1e-6));
    CHECK(f0.pdf(br.x1) == doctest::Approx(br.a).epsilon(1e-6));
    CHECK(br.b == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(f0.pdf(br.x2) == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(br.x2 == doctest::Approx(-std::log(0.01)).epsilon(1e-4));

    std::vector<double> w = scaled_uniform_weights(f0, 20, br.x1, br.x2);
    double total = 0.0;
    for (double wi : w) {
        CHECK(wi >= -1e-15);
        total += wi;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

    // increases along the grid -> rejected with a witness
    CHECK_THROWS_AS(scaled_uniform_weights(density_gamma(2.0, 1.0), 20, 0.5, 5.0),
                    std::invalid_argument);

    double prev = 1e9;
    for (int m : {20, 80, 320}) {
        MixtureDensity fm = scaled_uniform_approximant(f0, m);
        double err = std::abs(fm(1.0) - std::exp(-1.0));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("make_sequence wires families to their builders") {
    auto seq = make_sequence(ApproximantFamily::histogram, density_uniform01());
    MixtureDensity f4 = seq.at(4);
    CHECK(f4(0.6) == doctest::Approx(1.0).epsilon(1e-12));

    auto ls = make_sequence(ApproximantFamily::location_scale, density_normal(),
                            KernelSpec{KernelFamily::skew_normal, 0.0}, 0.5);
    CHECK(ls.at(4)(0.0) > 0.3);

    // exponential_truncated: built-in pareto target carries its Gamma(2,1) base
    auto ex = make_sequence(ApproximantFamily::exponential_truncated, density_pareto());
    CHECK(ex.at(8)(1.0) == doctest::Approx(0.25).epsilon(1e-2));
    CHECK_THROWS_AS(
        make_sequence(ApproximantFamily::exponential_truncated, density_exponential(1.0)),
        std::invalid_argument);

    CHECK(approximant_family_from_name("gamma_eq15") == ApproximantFamily::gamma_eq15);
    CHECK(approximant_family_from_name("bernstein") == ApproximantFamily::bernstein);
    CHECK_FALSE(approximant_family_from_name("nope").has_value());
    for (int i = 0; i < 8; ++i) {
        auto fam = static_cast<ApproximantFamily>(i);
        CHECK(approximant_family_from_name(approximant_family_name(fam)) == fam);
    }
}

TEST_CASE("lower-bound verification: gamma kernel floors hold") {
    const DensitySpec f0 = density_exponential(1.0);
    for (int m : {5, 10}) {
        auto seq = make_sequence(ApproximantFamily::gamma_eq15, f0);
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i)
            grid.push_back(std::pow(10.0, -2.0 + 3.0 * i / 40.0));  // 0.01 .. 10
        BoundReport rep = verify_lower_bounds(seq, m, grid, 0.25);
        CAPTURE(m);
        for (const auto& p : rep.points) {
            CAPTURE(p.x);
            CAPTURE(p.bound);
            CAPTURE(p.note);
            CHECK_FALSE(p.violated);
            if (!p.skipped) {
                CHECK(std::isfinite(p.floor));
                CHECK(p.value >= p.floor * (1.0 - 1e-9));
            }
        }
        CHECK(rep.violations() == 0);
    }
}

TEST_CASE("lower-bound verification: inverse-gamma floors hold") {
    const DensitySpec f0 = density_gamma(2.0, 1.0);
    auto seq = make_sequence(ApproximantFamily::inverse_gamma, f0);
    std::vector<double> grid = {0.2, 0.5, 1.0, 2.0, 5.0};
    BoundReport rep = verify_lower_bounds(seq, 10, grid, 0.25);
    CHECK(rep.violations() == 0);
    bool any_checked = false;
    for (const auto& p : rep.points)
        if (!p.skipped) any_checked = true;
    CHECK(any_checked);
}

TEST_CASE("gamma-kernel window mass diagnostics") {
    GammaKernelMass g = gamma_kernel_mass(100, 1.0, 0.5);
    CHECK(std::abs(g.c1 - 1.0) < 0.02);
    CHECK(g.c2 < 1e-3);
    CHECK(g.c2 >= 0.0);

    // envelope lower-bounds the one-sided window integral
    for (int m : {50, 100, 200})
        for (double x : {0.2, 0.5, 1.0, 2.0, 5.0}) {
            GammaKernelMass gm = gamma_kernel_mass(m, x, 0.25);
            CAPTURE(m);
            CAPTURE(x);
            CHECK(gm.envelope <= gm.window * (1.0 + 1e-9));
            CHECK(gm.envelope ==
                  doctest::Approx(lemma8_envelope(x, EnvelopeParams{0.25, {}})).epsilon(1e-12));
        }
}
