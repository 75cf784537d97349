// Serial reference vs OpenMP evaluation kernel on the maze and Blocksworld test splits.

#include <benchmark/benchmark.h>

#include "sysx/controller.hpp"
#include "sysx/eval.hpp"
#include "sysx/generator.hpp"

namespace {

struct Fixture {
    sysx::ProblemSets sets;
    sysx::PlannerConfig hybrid;
    sysx::PlannerConfig astar;
};

const Fixture& maze() {
    static const Fixture f = [] {
        Fixture f;
        f.sets = sysx::generate_maze_dataset(1);
        f.hybrid.kind = sysx::PlannerKind::system1x;
        f.hybrid.calibration = sysx::Calibration::fit(f.sets.train, sysx::HardnessSelector::maze_obstacles);
        f.astar.kind = sysx::PlannerKind::system2;
        return f;
    }();
    return f;
}

const Fixture& blocks() {
    static const Fixture f = [] {
        Fixture f;
        f.sets = sysx::generate_blocks_dataset(1);
        f.hybrid.kind = sysx::PlannerKind::system1x;
        f.hybrid.controller.hardness = sysx::HardnessSelector::blocks_distance;
        f.hybrid.calibration = sysx::Calibration::fit(f.sets.train, sysx::HardnessSelector::blocks_distance);
        f.astar.kind = sysx::PlannerKind::system2;
        return f;
    }();
    return f;
}

void BM_MazeAstarSerial(benchmark::State& state) {
    const auto& f = maze();
    for (auto _ : state) benchmark::DoNotOptimize(sysx::evaluate_serial(f.sets.test, f.astar));
}

void BM_MazeAstarParallel(benchmark::State& state) {
    const auto& f = maze();
    for (auto _ : state)
        benchmark::DoNotOptimize(sysx::evaluate_parallel(f.sets.test, f.astar, std::nullopt, static_cast<int>(state.range(0))));
}

void BM_MazeHybridSerial(benchmark::State& state) {
    const auto& f = maze();
    for (auto _ : state) benchmark::DoNotOptimize(sysx::evaluate_serial(f.sets.test, f.hybrid));
}

void BM_MazeHybridParallel(benchmark::State& state) {
    const auto& f = maze();
    for (auto _ : state)
        benchmark::DoNotOptimize(sysx::evaluate_parallel(f.sets.test, f.hybrid, std::nullopt, static_cast<int>(state.range(0))));
}

void BM_BlocksAstarSerial(benchmark::State& state) {
    const auto& f = blocks();
    for (auto _ : state) benchmark::DoNotOptimize(sysx::evaluate_serial(f.sets.test, f.astar));
}

void BM_BlocksAstarParallel(benchmark::State& state) {
    const auto& f = blocks();
    for (auto _ : state)
        benchmark::DoNotOptimize(sysx::evaluate_parallel(f.sets.test, f.astar, std::nullopt, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_MazeAstarSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MazeAstarParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MazeHybridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MazeHybridParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BlocksAstarSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlocksAstarParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
