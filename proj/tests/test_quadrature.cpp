#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "klkit/quadrature.hpp"

using namespace klkit;

TEST_CASE("polynomial and trigonometric anchors") {
    auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(std::abs(r.value - 1.0 / 3.0) <= r.error + 1e-15);

    r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

    // reversed limits integrate to zero-length
    r = integrate([](double x) { return x; }, 2.0, 2.0);
    CHECK(r.value == 0.0);
}

TEST_CASE("unbounded domains through the rational map") {
    auto r = integrate_real_line([](double x) { return std::exp(-0.5 * x * x); });
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-11));

    r = integrate_half_line([](double x) { return std::exp(-x); });
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));

    r = integrate_half_line([](double x) { return x * std::exp(-x); }, 0.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));

    // shifted half line
    r = integrate_half_line([](double x) { return std::exp(-(x - 3.0)); }, 3.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("integrable endpoint singularity") {
    const QuadOptions opt{1e-10, 0.0, 48, 40000};
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(r.nonfinite_nodes >= 0);
}

TEST_CASE("error bound is honest on a hard oscillator") {
    auto f = [](double x) { return std::cos(40.0 * x) * std::exp(-x); };
    const double truth = (40.0 * std::sin(40.0) - std::cos(40.0)) / std::exp(1.0) / 1601.0 +
                         1.0 / 1601.0;
    auto r = integrate(f, 0.0, 1.0, QuadOptions{1e-12, 0.0, 40, 20000});
    CHECK(r.converged);
    CHECK(std::abs(r.value - truth) <= r.error + 1e-14);
    CHECK(r.value == doctest::Approx(truth).epsilon(1e-10));
}

TEST_CASE("hints do not change the value") {
    auto f = [](double x) { return std::exp(-std::abs(x - 0.3) * 50.0); };
    auto plain = integrate(f, 0.0, 1.0, QuadOptions{1e-12, 0.0, 40, 20000});
    const std::vector<double> hints{0.3};
    auto hinted = integrate(f, 0.0, 1.0, QuadOptions{1e-12, 0.0, 40, 20000}, hints);
    CHECK(plain.value == doctest::Approx(hinted.value).epsilon(1e-10));
    // out-of-range hints are ignored
    const std::vector<double> bogus{-5.0, 9.0};
    auto ignored = integrate(f, 0.0, 1.0, QuadOptions{1e-12, 0.0, 40, 20000}, bogus);
    CHECK(ignored.value == doctest::Approx(plain.value).epsilon(1e-10));
}

TEST_CASE("panel budget exhaustion reports non-convergence") {
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.max_depth = 2;
    opt.max_panels = 4;
    auto r = integrate([](double x) { return std::sin(200.0 * x * x); }, 0.0, 3.0, opt);
    CHECK(!r.converged);
    CHECK(r.error > opt.abs_tol);
}

TEST_CASE("flagged nodes mark their panels") {
    FlaggedFn f = [](double x, bool* flag) {
        if (x > 0.7) *flag = true;
        return x;
    };
    auto r = integrate(f, 0.0, 1.0);
    CHECK(r.flagged_panels >= 1);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));

    FlaggedFn clean = [](double x, bool*) { return x; };
    CHECK(integrate(clean, 0.0, 1.0).flagged_panels == 0);
}

TEST_CASE("leaf partition export") {
    QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.collect_leaves = true;
    auto r = integrate([](double x) { return std::exp(x); }, -1.0, 2.0, opt);
    REQUIRE(!r.leaf_edges.empty());
    REQUIRE(r.leaf_values.size() + 1 == r.leaf_edges.size());
    CHECK(r.leaf_edges.front() == doctest::Approx(-1.0));
    CHECK(r.leaf_edges.back() == doctest::Approx(2.0));
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < r.leaf_edges.size(); ++i) {
        CHECK(r.leaf_edges[i] < r.leaf_edges[i + 1]);
        sum += r.leaf_values[i];
    }
    CHECK(sum == doctest::Approx(r.value).epsilon(1e-12));

    // off by default
    auto plain = integrate([](double x) { return std::exp(x); }, -1.0, 2.0);
    CHECK(plain.leaf_edges.empty());
}

TEST_CASE("results are deterministic") {
    auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
    auto a = integrate_real_line(f);
    auto b = integrate_real_line(f);
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
    CHECK(a.evaluations == b.evaluations);
}
