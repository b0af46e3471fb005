// Microbenchmarks for the hot paths: quadrature, KL evaluation, mixture
// evaluation, and stick-breaking sampling.

#include <benchmark/benchmark.h>

#include <cmath>

#include "klkit/approximants.hpp"
#include "klkit/densities.hpp"
#include "klkit/kl_engine.hpp"
#include "klkit/prior_mc.hpp"
#include "klkit/quadrature.hpp"
#include "klkit/special_fn.hpp"

namespace {

using namespace klkit;

void BM_quadrature_gaussian(benchmark::State& state) {
    const QuadOptions opt{1e-10, 0.0, 40, 20000};
    for (auto _ : state) {
        auto r = integrate([](double x) { return std::exp(-0.5 * x * x); }, -8.0, 8.0, opt);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_quadrature_gaussian);

void BM_digamma(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(digamma(x));
        x += 0.1;
        if (x > 50.0) x = 0.1;
    }
}
BENCHMARK(BM_digamma);

void BM_kl_normal_pair(benchmark::State& state) {
    const DensitySpec f = density_normal(0.0, 1.0);
    const DensitySpec g = density_normal(1.0, 1.0);
    for (auto _ : state) {
        auto r = kl_divergence(f, g, 1e-8);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_kl_normal_pair);

void BM_mixture_eval(benchmark::State& state) {
    const DensitySpec f0 = density_exponential(1.0);
    const auto seq = make_sequence(ApproximantFamily::gamma_eq15, f0);
    const MixtureDensity fm = seq.at(static_cast<int>(state.range(0)));
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fm(x));
        x += 0.37;
        if (x > 10.0) x = 0.01;
    }
}
BENCHMARK(BM_mixture_eval)->Arg(16)->Arg(64);

void BM_stick_breaking(benchmark::State& state) {
    DPSpec dp;
    dp.base.components = {BaseComponent{BaseComponent::Kind::normal, 0.0, 1.0}};
    dp.truncation = static_cast<int>(state.range(0));
    std::uint64_t draw = 0;
    for (auto _ : state) {
        auto p = stick_breaking_sample(dp, 7, draw++);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_stick_breaking)->Arg(100)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
