#include <grushin/balls.hpp>
#include <grushin/kernels.hpp>
#include <grushin/maximal.hpp>
#include <grushin/mu.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace grushin;

namespace {

std::vector<std::pair<Point, Point>> pairs(int n, int count) {
    Rng rng(1);
    std::vector<std::pair<Point, Point>> out;
    for (int i = 0; i < count; ++i) {
        Point g(std::vector<double>(n), rng.normal()), gp(std::vector<double>(n), rng.normal());
        for (int k = 0; k < n; ++k) {
            g.x[k] = rng.normal();
            gp.x[k] = rng.normal();
        }
        out.emplace_back(std::move(g), std::move(gp));
    }
    return out;
}

void BM_MuInverse(benchmark::State& state) {
    Rng rng(2);
    std::vector<std::pair<double, double>> in(1024);
    for (auto& [a, m] : in) {
        a = rng.uniform(-0.99, 1.0);
        m = rng.uniform(0.0, 50.0);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [a, m] = in[i++ % in.size()];
        benchmark::DoNotOptimize(mu_inverse(a, m));
    }
}
BENCHMARK(BM_MuInverse);

void BM_DistanceCC(benchmark::State& state) {
    const auto ps = pairs(static_cast<int>(state.range(0)), 1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [g, gp] = ps[i++ % ps.size()];
        benchmark::DoNotOptimize(d_CC(g, gp));
    }
}
BENCHMARK(BM_DistanceCC)->Arg(1)->Arg(10);

void BM_VolumeBK(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(volume_BK_exact(0.7, n, 1.0).value);
}
BENCHMARK(BM_VolumeBK)->Arg(1)->Arg(3)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_VolumeBCC(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(volume_BCC_exact(0.7, n).value);
}
BENCHMARK(BM_VolumeBCC)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_HeatKernel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = kernel_config(n);
    const auto ps = pairs(n, 64);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [g, gp] = ps[i++ % ps.size()];
        benchmark::DoNotOptimize(heat_kernel(g, gp, 1.0, cfg));
    }
}
BENCHMARK(BM_HeatKernel)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_PoissonShifted(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = kernel_config(n);
    const auto ps = pairs(n, 64);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [g, gp] = ps[i++ % ps.size()];
        benchmark::DoNotOptimize(poisson_shifted(pair_invariants(g, gp), 1.0, cfg).value);
    }
}
BENCHMARK(BM_PoissonShifted)->Arg(3)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_GreenFunction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = kernel_config(n);
    const auto ps = pairs(n, 64);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [g, gp] = ps[i++ % ps.size()];
        benchmark::DoNotOptimize(green_function(g, gp, cfg));
    }
}
BENCHMARK(BM_GreenFunction)->Arg(3)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_MaximalK(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    auto f = GridFunction::cube(1, 2.0, side, 2.0, side);
    Rng rng(3);
    for (auto& v : f.values()) v = rng.uniform();
    const auto radii = default_radii(f, MaximalMetric::K);
    for (auto _ : state) benchmark::DoNotOptimize(maximal(f, MaximalMetric::K, radii).values().data());
}
BENCHMARK(BM_MaximalK)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
