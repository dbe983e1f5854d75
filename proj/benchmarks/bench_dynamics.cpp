#include <benchmark/benchmark.h>

#include <vector>

#include "hknoise/ensemble.hpp"
#include "hknoise/metrics.hpp"
#include "hknoise/trajectory.hpp"

using namespace hknoise;

namespace {

OpinionState random_state(std::size_t n, std::uint64_t seed) {
    RandomStream s(seed);
    OpinionState state;
    state.values.resize(n);
    for (auto& v : state.values) v = s.next_unit();
    return state;
}

void BM_Step(benchmark::State& bench) {
    const auto n = static_cast<std::size_t>(bench.range(0));
    const ConfidenceThreshold eps(0.2);
    const auto model = NoiseModel::uniform(0.02);
    OpinionState state = random_state(n, 7);
    RandomStream stream = RandomStream(7).substream(1);
    std::vector<double> noise(n);
    for (auto _ : bench) {
        model.sample_vector(noise, stream);
        state = step(state, noise, eps);
        benchmark::DoNotOptimize(state.values.data());
    }
    bench.SetItemsProcessed(bench.iterations() * static_cast<std::int64_t>(n));
}

void BM_Trajectory(benchmark::State& bench) {
    SimulationConfig cfg;
    cfg.n = static_cast<std::size_t>(bench.range(0));
    cfg.epsilon = 0.2;
    cfg.noise = NoiseModel::uniform(0.02);
    cfg.initial = InitialCondition::uniform_random();
    cfg.horizon = 10000;
    cfg.master_seed = 13;
    cfg.record_clusters = false;
    for (auto _ : bench) {
        auto traj = run_trajectory(cfg, std::uint64_t{0});
        benchmark::DoNotOptimize(traj.diameter.data());
    }
    bench.SetItemsProcessed(bench.iterations() * cfg.horizon);
}

void BM_NoiseSample(benchmark::State& bench) {
    const auto model = NoiseModel::truncated_gaussian(0.05, 0.1);
    RandomStream stream(3);
    std::vector<double> noise(1024);
    for (auto _ : bench) {
        model.sample_vector(noise, stream);
        benchmark::DoNotOptimize(noise.data());
    }
    bench.SetItemsProcessed(bench.iterations() * 1024);
}

void BM_Clusters(benchmark::State& bench) {
    const auto state = random_state(static_cast<std::size_t>(bench.range(0)), 11);
    const ConfidenceThreshold eps(0.05);
    for (auto _ : bench) {
        auto partition = clusters(state, eps);
        benchmark::DoNotOptimize(partition.groups.data());
    }
}

} // namespace

BENCHMARK(BM_Step)->Arg(10)->Arg(20)->Arg(50)->Arg(200);
BENCHMARK(BM_Trajectory)->Arg(10)->Arg(20);
BENCHMARK(BM_NoiseSample);
BENCHMARK(BM_Clusters)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
