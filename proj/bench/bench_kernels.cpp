// Serial reference kernels against their OpenMP counterparts, plus the two
// photon-routing modes of the simulator.

#include <benchmark/benchmark.h>

#include <vector>

#include "superosc/bounds.hpp"
#include "superosc/measurement.hpp"
#include "superosc/parallel.hpp"
#include "superosc/simulator.hpp"

using namespace superosc;

namespace {

constexpr double kPi = 3.14159265358979323846;

RunConfig ensemble_config(SamplingMode mode, double photons) {
    RunConfig cfg;
    cfg.delta = 0.1;
    cfg.photons = photons;
    cfg.trials = 200;
    cfg.mu_max = 4;
    cfg.sampling = mode;
    return cfg;
}

void BM_EnsembleSerial(benchmark::State& state) {
    const Experiment exp(ensemble_config(SamplingMode::aggregated, 1e6));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(exp));
}

void BM_EnsembleParallel(benchmark::State& state) {
    const Experiment exp(ensemble_config(SamplingMode::aggregated, 1e6));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(exp));
    state.counters["threads"] = max_threads();
}

void BM_EnsemblePerPhoton(benchmark::State& state) {
    const Experiment exp(ensemble_config(SamplingMode::per_photon, static_cast<double>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(exp));
}

void BM_EnsembleAggregated(benchmark::State& state) {
    const Experiment exp(ensemble_config(SamplingMode::aggregated, static_cast<double>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(exp));
}

std::vector<double> grid() {
    std::vector<double> xs(1201);
    for (int i = 0; i < 1201; ++i) xs[i] = -3.0 + 6.0 * i / 1200;
    return xs;
}

void BM_FilterGridSerial(benchmark::State& state) {
    const auto sys = build_optics(OtfKind::rectangular, kPi, kDefaultQMax);
    const auto basis = build_basis(ReferenceDensity::rectangle(), 8);
    const FilterFunction b(sys, basis, 0.2, 8);
    const auto xs = grid();
    for (auto _ : state) benchmark::DoNotOptimize(filter_grid_serial(b, xs));
}

void BM_FilterGridParallel(benchmark::State& state) {
    const auto sys = build_optics(OtfKind::rectangular, kPi, kDefaultQMax);
    const auto basis = build_basis(ReferenceDensity::rectangle(), 8);
    const FilterFunction b(sys, basis, 0.2, 8);
    const auto xs = grid();
    for (auto _ : state) benchmark::DoNotOptimize(filter_grid(b, xs));
}

void BM_FisherSerial(benchmark::State& state) {
    const auto sys = build_optics(OtfKind::rectangular, kPi, kDefaultQMax);
    const auto sub = make_submodel(build_basis(ReferenceDensity::rectangle(), 3), SceneModel::rect(0.1), 2);
    for (auto _ : state) benchmark::DoNotOptimize(fisher_direct_serial(sys, sub));
}

void BM_FisherParallel(benchmark::State& state) {
    const auto sys = build_optics(OtfKind::rectangular, kPi, kDefaultQMax);
    const auto sub = make_submodel(build_basis(ReferenceDensity::rectangle(), 3), SceneModel::rect(0.1), 2);
    for (auto _ : state) benchmark::DoNotOptimize(fisher_direct(sys, sub));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsemblePerPhoton)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleAggregated)->Arg(1000)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FilterGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FilterGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FisherSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FisherParallel)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
