#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "klkit/densities.hpp"
#include "klkit/quadrature.hpp"

using namespace klkit;

namespace {
constexpr double kPi = 3.141592653589793238462643;

double mass_of(const DensitySpec& d) {
    switch (d.support) {
        case Support::unit_interval:
            return integrate(d.pdf, 0.0, 1.0).value;
        case Support::positive_half_line:
            return integrate_half_line(d.pdf, 0.0).value;
        case Support::real_line:
            return integrate_real_line(d.pdf).value;
    }
    return 0.0;
}
}  // namespace

TEST_CASE("builtin densities normalize and expose sane bounds") {
    const DensitySpec all[] = {
        density_normal(),         density_normal(1.5, 0.3),
        density_uniform01(),      density_exponential(2.0),
        density_gamma(3.0, 1.0),  density_gamma(0.7, 2.0),
        density_cauchy(0.0, 2.0), density_laplace(-1.0, 0.5),
        density_lognormal(),      density_parabolic(),
        density_pareto(),         density_normal_mixture2(0.3, -2.0, 1.0, 2.0, 0.5),
    };
    for (const auto& d : all) {
        CAPTURE(d.name);
        CHECK(mass_of(d) == doctest::Approx(1.0).epsilon(1e-7));
        if (d.upper_bound) {
            // bound must actually dominate the pdf on a grid
            auto [lo, hi] = core_interval(d, 1e-8);
            for (int i = 0; i <= 64; ++i) {
                double x = lo + (hi - lo) * i / 64.0;
                CHECK(d.pdf(x) <= *d.upper_bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("pointwise anchor values") {
    CHECK(density_normal().pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));
    CHECK(density_uniform01().pdf(0.25) == 1.0);
    CHECK(density_uniform01().pdf(1.5) == 0.0);
    CHECK(density_exponential(1.0).pdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(density_gamma(2.0, 1.0).pdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(density_cauchy().pdf(0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(density_laplace().pdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(density_parabolic().pdf(0.5) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(density_pareto().pdf(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    // log_pdf agrees with log(pdf) where positive
    const DensitySpec ln = density_lognormal(0.5, 1.2);
    for (double x : {0.1, 0.5, 1.0, 3.0, 20.0})
        CHECK(ln.log_eval(x) == doctest::Approx(std::log(ln.pdf(x))).epsilon(1e-12));
}

TEST_CASE("mv_normal evaluates a product of standard normals") {
    const DensitySpec d2 = density_mv_normal(2);
    CHECK(d2.dimension == 2);
    const double at_origin[] = {0.0, 0.0};
    CHECK(d2.pdf_nd(at_origin) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
    const double off[] = {1.0, -1.0};
    CHECK(d2.pdf_nd(off) == doctest::Approx(std::exp(-1.0) / (2.0 * kPi)).epsilon(1e-13));
    CHECK_THROWS_AS(density_mv_normal(0), std::invalid_argument);
    CHECK_THROWS_AS(density_mv_normal(5), std::invalid_argument);
}

TEST_CASE("validate_density rejects bad mass and violated bounds") {
    DensitySpec bogus;
    bogus.name = "double_uniform";
    bogus.support = Support::unit_interval;
    bogus.pdf = [](double) { return 2.0; };
    CHECK_THROWS_AS(validate_density(bogus), std::invalid_argument);

    DensitySpec lying = density_uniform01();
    lying.upper_bound = 0.5;  // pdf is 1 everywhere
    CHECK_THROWS_AS(validate_density(lying), std::invalid_argument);

    CHECK_NOTHROW(validate_density(density_normal()));
}

TEST_CASE("table densities: piecewise polynomials with local coordinates") {
    // constant table == uniform
    DensitySpec flat = density_from_table(Support::unit_interval, {0.0, 0.5, 1.0},
                                          {{1.0}, {1.0}});
    CHECK(flat.pdf(0.2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(flat.pdf(0.9) == doctest::Approx(1.0).epsilon(1e-14));

    // ramp 2x on [0,1], already unit mass
    DensitySpec ramp = density_from_table(Support::unit_interval, {0.0, 1.0}, {{0.0, 2.0}});
    CHECK(ramp.pdf(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ramp.pdf(0.75) == doctest::Approx(1.5).epsilon(1e-14));

    // non-normalized input gets rescaled to unit mass
    DensitySpec scaled = density_from_table(Support::unit_interval, {0.0, 1.0}, {{5.0}});
    CHECK(scaled.pdf(0.5) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(density_from_table(Support::unit_interval, {0.0, 1.0}, {{1.0}, {1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_table(Support::unit_interval, {0.5, 0.0}, {{1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_table(Support::unit_interval, {0.0, 1.0}, {{0.0}}),
                    std::invalid_argument);
}

TEST_CASE("make_builtin_density honors named parameters and rejects unknown names") {
    auto n = make_builtin_density("normal", {{"mu", 1.0}, {"sigma", 2.0}});
    CHECK(n.pdf(1.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * kPi))).epsilon(1e-14));
    auto g = make_builtin_density("gamma", {{"shape", 2.0}, {"rate", 1.0}});
    CHECK(g.pdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    auto e = make_builtin_density("exp", {});
    CHECK(e.pdf(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(make_builtin_density("triangle", {}), std::invalid_argument);
}

TEST_CASE("phi_delta window infimum") {
    const DensitySpec u = density_uniform01();
    CHECK(phi_delta(u, 0.5, 0.1) == doctest::Approx(1.0).epsilon(1e-9));

    const DensitySpec n = density_normal();
    // symmetric unimodal: the two-sided infimum at the mode sits at the edge
    CHECK(phi_delta(n, 0.0, 0.1) == doctest::Approx(0.3969525474770118).epsilon(1e-9));

    // monotone tail: infimum at the far edge of the window
    CHECK(phi_delta(n, 2.0, 0.5) == doctest::Approx(n.pdf(2.5)).epsilon(1e-9));

    const DensitySpec ex = density_exponential(1.0);
    // one-sided variant looks left of x for x >= 1, so a decreasing density
    // attains the infimum at x itself
    for (double x : {1.0, 2.0, 5.0})
        CHECK(phi_delta(ex, x, 0.25, PhiDeltaVariant::one_sided) ==
              doctest::Approx(ex.pdf(x)).epsilon(1e-9));
    // ... and right of x below 1
    CHECK(phi_delta(ex, 0.5, 0.25, PhiDeltaVariant::one_sided) ==
          doctest::Approx(ex.pdf(0.75)).epsilon(1e-9));

    // window clipped to the support: uniform near the right endpoint
    CHECK(phi_delta(u, 0.95, 0.2) == doctest::Approx(1.0).epsilon(1e-9));

    SUBCASE("dominated by the density everywhere") {
        const DensitySpec p = density_parabolic();
        for (int i = 1; i < 20; ++i) {
            double x = i / 20.0;
            CHECK(phi_delta(p, x, 0.05) <= p.pdf(x) * (1.0 + 1e-12));
        }
    }
    SUBCASE("non-increasing in delta") {
        double prev = phi_delta(n, 1.0, 0.05);
        for (double d : {0.1, 0.2, 0.4, 0.8}) {
            double cur = phi_delta(n, 1.0, d);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
    CHECK_THROWS_AS(phi_delta(n, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("log_transform carries (0,inf) densities to the real line") {
    // lognormal(0,1) maps to the standard normal
    const DensitySpec g = log_transform(density_lognormal(0.0, 1.0));
    const DensitySpec n = density_normal();
    CHECK(g.support == Support::real_line);
    for (double y : {-3.0, -1.0, 0.0, 0.7, 2.5})
        CHECK(g.pdf(y) == doctest::Approx(n.pdf(y)).epsilon(1e-12));

    // Exp(1) maps to y -> exp(y - e^y)
    const DensitySpec w = log_transform(density_exponential(1.0));
    for (double y : {-2.0, -0.5, 0.0, 1.0})
        CHECK(w.pdf(y) == doctest::Approx(std::exp(y - std::exp(y))).epsilon(1e-12));
    CHECK(w.pdf(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    // mass is preserved
    const DensitySpec tg = log_transform(density_gamma(2.0, 1.0));
    CHECK(integrate_real_line(tg.pdf).value == doctest::Approx(1.0).epsilon(1e-7));

    CHECK_THROWS_AS(log_transform(density_normal()), std::invalid_argument);
    CHECK_THROWS_AS(log_transform(density_uniform01()), std::invalid_argument);
}

TEST_CASE("survival function") {
    CHECK(survival(density_exponential(1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(survival(density_pareto(), 1.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(survival(density_exponential(2.0), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(survival(density_uniform01(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(survival(density_uniform01(), 0.25) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(survival(density_normal(), 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    // deep tail stays within [0,1] and decreasing
    double prev = 1.0;
    for (double x : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        double s = survival(density_gamma(3.0, 1.0), x);
        CHECK(s >= 0.0);
        CHECK(s <= prev + 1e-12);
        prev = s;
    }
}

TEST_CASE("core_interval captures the requested mass") {
    const DensitySpec n = density_normal();
    auto [lo, hi] = core_interval(n, 1e-10);
    CHECK(lo < -5.0);
    CHECK(hi > 5.0);
    CHECK(integrate(n.pdf, lo, hi).value == doctest::Approx(1.0).epsilon(1e-8));

    auto [ulo, uhi] = core_interval(density_uniform01(), 1e-10);
    CHECK(ulo >= -1e-9);
    CHECK(uhi <= 1.0 + 1e-9);

    auto [glo, ghi] = core_interval(density_gamma(2.0, 1.0), 1e-10);
    CHECK(glo >= 0.0);
    CHECK(integrate(density_gamma(2.0, 1.0).pdf, glo, ghi).value ==
          doctest::Approx(1.0).epsilon(1e-8));
}
