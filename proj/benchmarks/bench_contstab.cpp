#include <benchmark/benchmark.h>

#include "contstab/nystrom.hpp"
#include "contstab/powerlaw.hpp"
#include "contstab/tikhonov.hpp"

using namespace contstab;

namespace {
const Geometry kAnnulus{Annulus(0.25, 0.5)};
const cdouble kZ(0.75, 0.0);
}

static void SpectralSolve(benchmark::State& state) {
    double eps = std::pow(10.0, -state.range(0));
    for (auto _ : state) {
        TikhonovSolution sol = solve(kAnnulus, kZ, eps);
        benchmark::DoNotOptimize(sol.value_at_z);
    }
}
BENCHMARK(SpectralSolve)->Arg(3)->Arg(6)->Arg(9)->Arg(12);

static void MaximizerBuild(benchmark::State& state) {
    double eps = std::pow(10.0, -state.range(0));
    for (auto _ : state) {
        Maximizer m = maximizer(kAnnulus, kZ, eps);
        benchmark::DoNotOptimize(m.abs_at_z);
    }
}
BENCHMARK(MaximizerBuild)->Arg(4)->Arg(8);

static void DualCertificateRoot(benchmark::State& state) {
    double eps = std::pow(10.0, -state.range(0));
    for (auto _ : state) {
        DualCertificate cert = dual_certificate(kAnnulus, kZ, eps);
        benchmark::DoNotOptimize(cert.eta_star);
    }
}
BENCHMARK(DualCertificateRoot)->Arg(3)->Arg(6);

static void SweepElevenPoints(benchmark::State& state) {
    for (auto _ : state) {
        SweepResult res = sweep(
            [](double eps) { return bound(solve(kAnnulus, kZ, eps)).bound_value; }, 1e-8, 1e-3,
            11);
        benchmark::DoNotOptimize(res.fitted_slope);
    }
}
BENCHMARK(SweepElevenPoints);

static void NystromBuild(benchmark::State& state) {
    int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        NystromOperator op = nystrom_build(kAnnulus, m);
        benchmark::DoNotOptimize(op.matrix_a.data());
    }
    state.SetComplexityN(m);
}
BENCHMARK(NystromBuild)->Arg(64)->Arg(128)->Arg(256)->Complexity();

static void NystromSpectrumDD(benchmark::State& state) {
    int m = static_cast<int>(state.range(0));
    NystromOperator op = nystrom_build(kAnnulus, m);
    for (auto _ : state) {
        NumericalSpectrum spec = nystrom_spectrum(op);
        benchmark::DoNotOptimize(spec.eigenvalues.data());
    }
    state.SetComplexityN(m);
}
BENCHMARK(NystromSpectrumDD)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond)->Complexity();

static void NystromGridSolve(benchmark::State& state) {
    NystromOperator op = nystrom_build(kAnnulus, 256);
    for (auto _ : state) {
        NystromSolution sol = nystrom_solve(op, kZ, 1e-3);
        benchmark::DoNotOptimize(sol.values.data());
    }
}
BENCHMARK(NystromGridSolve)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
