#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "klkit/kernels.hpp"
#include "klkit/quadrature.hpp"

using namespace klkit;

namespace {
constexpr double kPi = 3.141592653589793238462643;

double eval1(const KernelSpec& k, double x, std::vector<double> theta,
             std::vector<double> phi = {}) {
    return kernel_eval(k, x, theta, phi);
}

double mass1(const KernelSpec& k, std::vector<double> theta, std::vector<double> phi = {}) {
    auto f = [&](double x) { return kernel_eval(k, x, theta, phi); };
    switch (kernel_sample_support(k)) {
        case Support::unit_interval:
            return integrate(f, 0.0, 1.0, QuadOptions{1e-10, 0.0, 40, 20000}).value;
        case Support::positive_half_line:
            return integrate_half_line(f, 0.0, QuadOptions{1e-10, 0.0, 40, 20000}).value;
        case Support::real_line:
            return integrate_real_line(f, QuadOptions{1e-10, 0.0, 40, 20000}).value;
    }
    return 0.0;
}
}  // namespace

TEST_CASE("kernel anchor values") {
    CHECK(eval1({KernelFamily::skew_normal, 0.0}, 0.0, {0.0}, {1.0}) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));
    // histogram: x and theta in the same of m equal bins -> m
    CHECK(eval1({KernelFamily::histogram}, 0.3, {0.5}, {2.0}) == doctest::Approx(2.0));
    CHECK(eval1({KernelFamily::histogram}, 0.3, {0.75}, {2.0}) == 0.0);
    CHECK(eval1({KernelFamily::exponential}, 1.0, {1.0}) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    KernelSpec gamma_k{KernelFamily::gamma};
    CHECK(kernel_log_eval(gamma_k, 1.0, std::vector<double>{2.0, 1.0}, {}) ==
          doctest::Approx(-1.0).epsilon(1e-13));
    // scaled uniform vanishes beyond its width
    KernelSpec su{KernelFamily::scaled_uniform};
    CHECK(kernel_log_eval(su, 2.0, std::vector<double>{1.0}, {}) ==
          -std::numeric_limits<double>::infinity());
    CHECK(eval1(su, 0.5, {1.0}) == doctest::Approx(1.0));
    KernelSpec t1{KernelFamily::student_t, 0.0, 1.0};
    CHECK(kernel_log_eval(t1, 0.0, std::vector<double>{0.0}, std::vector<double>{1.0}) ==
          doctest::Approx(std::log(1.0 / kPi)).epsilon(1e-13));
    // triangular hat peaks at its node
    KernelSpec tri{KernelFamily::triangular};
    CHECK(eval1(tri, 0.5, {2.0}, {4.0}) == doctest::Approx(4.0));
    CHECK(eval1(tri, 0.75, {2.0}, {4.0}) == 0.0);
    // bernstein component j of degree k is a Beta(j+1, k-j+1) density
    KernelSpec be{KernelFamily::bernstein};
    CHECK(eval1(be, 0.5, {1.0}, {2.0}) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("every family integrates to one") {
    struct Row {
        KernelSpec spec;
        std::vector<double> theta;
        std::vector<double> phi;
    };
    const Row rows[] = {
        {{KernelFamily::skew_normal, 0.0}, {0.3}, {0.8}},
        {{KernelFamily::skew_normal, 2.0}, {-1.0}, {1.3}},
        {{KernelFamily::mv_normal, 0.0, 1.0, 1}, {0.5}, {2.0}},
        {{KernelFamily::double_exponential}, {0.7}, {0.4}},
        {{KernelFamily::logistic}, {-0.5}, {1.1}},
        {{KernelFamily::student_t, 0.0, 1.0}, {0.0}, {1.0}},
        {{KernelFamily::student_t, 0.0, 4.0}, {2.0}, {0.6}},
        {{KernelFamily::histogram}, {0.37}, {8.0}},
        {{KernelFamily::triangular}, {3.0}, {5.0}},
        {{KernelFamily::triangular}, {0.0}, {5.0}},
        {{KernelFamily::bernstein}, {2.0}, {6.0}},
        {{KernelFamily::lognormal}, {0.2}, {0.9}},
        {{KernelFamily::weibull}, {1.7}, {2.2}},
        {{KernelFamily::gamma}, {2.5, 0.8}, {}},
        {{KernelFamily::inverse_gamma}, {3.0, 1.5}, {}},
        {{KernelFamily::exponential}, {1.4}, {}},
        {{KernelFamily::scaled_uniform}, {2.5}, {}},
    };
    for (const auto& r : rows) {
        CAPTURE(family_name(r.spec.family));
        CAPTURE(r.theta[0]);
        CHECK(mass1(r.spec, r.theta, r.phi) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // mv_normal dim 2 via iterated quadrature
    KernelSpec m2{KernelFamily::mv_normal, 0.0, 1.0, 2};
    std::vector<double> th{0.0, 0.5}, ph{1.2};
    auto inner = [&](double x0) {
        auto f = [&](double x1) {
            double x[2] = {x0, x1};
            return kernel_eval(m2, std::span<const double>(x, 2), th, ph);
        };
        return integrate_real_line(f, QuadOptions{1e-9, 0.0, 30, 8000}).value;
    };
    CHECK(integrate_real_line(inner, QuadOptions{1e-7, 0.0, 30, 8000}).value ==
          doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("arities and sample supports") {
    CHECK(theta_arity({KernelFamily::skew_normal}) == 1);
    CHECK(phi_arity({KernelFamily::skew_normal}) == 1);
    CHECK(theta_arity({KernelFamily::mv_normal, 0.0, 1.0, 3}) == 3);
    CHECK(phi_arity({KernelFamily::mv_normal, 0.0, 1.0, 3}) == 1);
    CHECK(theta_arity({KernelFamily::gamma}) == 2);
    CHECK(phi_arity({KernelFamily::gamma}) == 0);
    CHECK(theta_arity({KernelFamily::scaled_uniform}) == 1);
    CHECK(phi_arity({KernelFamily::scaled_uniform}) == 0);
    CHECK(kernel_sample_support({KernelFamily::logistic}) == Support::real_line);
    CHECK(kernel_sample_support({KernelFamily::histogram}) == Support::unit_interval);
    CHECK(kernel_sample_support({KernelFamily::bernstein}) == Support::unit_interval);
    CHECK(kernel_sample_support({KernelFamily::gamma}) == Support::positive_half_line);
    CHECK(kernel_sample_support({KernelFamily::lognormal}) == Support::positive_half_line);
}

TEST_CASE("family_from_name accepts aliases") {
    CHECK(family_from_name("normal") == KernelFamily::skew_normal);
    CHECK(family_from_name("skew_normal") == KernelFamily::skew_normal);
    CHECK(family_from_name("laplace") == KernelFamily::double_exponential);
    CHECK(family_from_name("t") == KernelFamily::student_t);
    CHECK(family_from_name("student_t") == KernelFamily::student_t);
    CHECK(family_from_name("scaled_uniform") == KernelFamily::scaled_uniform);
    CHECK_FALSE(family_from_name("epanechnikov").has_value());
    for (int i = 0; i < 14; ++i) {
        auto fam = static_cast<KernelFamily>(i);
        CHECK(family_from_name(family_name(fam)) == fam);
    }
}

TEST_CASE("invalid parameters throw domain errors") {
    KernelSpec sn{KernelFamily::skew_normal};
    CHECK_THROWS_AS(eval1(sn, 0.0, {0.0}, {0.0}), std::domain_error);
    CHECK_THROWS_AS(eval1(sn, 0.0, {0.0}, {-1.0}), std::domain_error);
    CHECK_THROWS_AS(eval1({KernelFamily::gamma}, 1.0, {-2.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(eval1({KernelFamily::exponential}, 1.0, {0.0}), std::domain_error);
    CHECK_THROWS_AS(eval1({KernelFamily::histogram}, 0.5, {0.5}, {0.0}), std::domain_error);
    CHECK_THROWS_AS(eval1({KernelFamily::scaled_uniform}, 1.0, {-1.0}), std::domain_error);
}

TEST_CASE("location-scale views and score ratios") {
    const LocationScaleView norm = to_location_scale({KernelFamily::skew_normal, 0.0});
    CHECK(norm.density1(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));
    // normal base: chi'(z)/chi(z) = -z
    for (double z : {-2.0, -0.5, 0.5, 3.0})
        CHECK(score_ratio1(norm, z) == doctest::Approx(-z).epsilon(1e-12));

    const LocationScaleView lap = to_location_scale({KernelFamily::double_exponential});
    CHECK(score_ratio1(lap, 2.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(lap.score1(-2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(lap.score1(0.0), std::domain_error);

    const LocationScaleView t1 = to_location_scale({KernelFamily::student_t, 0.0, 1.0});
    // -(nu+1) z / (nu + z^2) at nu=1, z=1 -> -1
    CHECK(t1.score1(1.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(score_ratio1(t1, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));

    const LocationScaleView lg = to_location_scale({KernelFamily::logistic});
    // logistic score tends to -1 in the far tail
    CHECK(lg.score1(20.0) == doctest::Approx(-1.0).epsilon(1e-8));

    SUBCASE("scores match finite differences") {
        const LocationScaleView views[] = {
            norm, lap, t1, lg,
            to_location_scale({KernelFamily::skew_normal, 1.5}),
            to_location_scale({KernelFamily::student_t, 0.0, 3.0}),
        };
        const double h = 1e-6;
        for (const auto& v : views) {
            for (double z : {-2.3, -1.1, 0.4, 1.7, 3.2}) {
                double fd = (v.log_density1(z + h) - v.log_density1(z - h)) / (2.0 * h);
                CHECK(v.score1(z) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }

    SUBCASE("log-scale reductions") {
        const LocationScaleView w = to_location_scale({KernelFamily::weibull});
        CHECK(w.density1(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
        for (double z : {-1.5, -0.2, 0.5, 1.2})
            CHECK(w.score1(z) == doctest::Approx(1.0 - std::exp(z)).epsilon(1e-10));
        const LocationScaleView ln = to_location_scale({KernelFamily::lognormal});
        for (double z : {-2.0, 0.0, 1.3})
            CHECK(ln.density1(z) ==
                  doctest::Approx(std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi)).epsilon(1e-13));
    }

    CHECK_THROWS_AS(to_location_scale({KernelFamily::gamma}), std::invalid_argument);
    CHECK_THROWS_AS(to_location_scale({KernelFamily::histogram}), std::invalid_argument);
    CHECK_THROWS_AS(to_location_scale({KernelFamily::scaled_uniform}), std::invalid_argument);
}

TEST_CASE("skew_normal with zero slant equals mv_normal in one dimension") {
    KernelSpec sn{KernelFamily::skew_normal, 0.0};
    KernelSpec mv{KernelFamily::mv_normal, 0.0, 1.0, 1};
    std::vector<double> theta{0.4}, phi{0.9};
    for (double x : {-3.0, -1.0, 0.0, 0.4, 1.2, 4.0})
        CHECK(kernel_eval(sn, x, theta, phi) ==
              doctest::Approx(kernel_eval(mv, x, theta, phi)).epsilon(1e-14));
}

TEST_CASE("kernel_eval scalar and span overloads agree") {
    KernelSpec sn{KernelFamily::skew_normal, 1.0};
    std::vector<double> theta{0.0}, phi{1.0};
    for (double x : {-1.0, 0.0, 2.0}) {
        double xs[1] = {x};
        CHECK(kernel_eval(sn, x, theta, phi) ==
              kernel_eval(sn, std::span<const double>(xs, 1), theta, phi));
        CHECK(kernel_log_eval(sn, x, theta, phi) ==
              doctest::Approx(std::log(kernel_eval(sn, x, theta, phi))).epsilon(1e-12));
    }
}

TEST_CASE("histogram bin convention places the left endpoint in bin one") {
    KernelSpec h{KernelFamily::histogram};
    CHECK(eval1(h, 0.0, {0.3}, {2.0}) == doctest::Approx(2.0));
    CHECK(eval1(h, 0.5, {0.3}, {2.0}) == doctest::Approx(2.0));   // 0.5 in (0, 1/2]
    CHECK(eval1(h, 0.51, {0.3}, {2.0}) == 0.0);
    CHECK(eval1(h, 1.0, {0.9}, {4.0}) == doctest::Approx(4.0));
}
