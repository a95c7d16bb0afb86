#include <benchmark/benchmark.h>

#include <random>

#include "tfe/asymptotics.hpp"
#include "tfe/banded.hpp"
#include "tfe/selfsimilar.hpp"
#include "tfe/transient.hpp"

using namespace tfe;

namespace {

ProblemParams unit(double n, double alpha) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = NormalizedFriction{1.0};
    return p;
}

void BM_BandedSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BandedMatrix a(n, 3, 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = (i > 3 ? i - 3 : 0); j <= std::min(n - 1, i + 3); ++j) a.at(i, j) = u(rng) + (i == j ? 8.0 : 0.0);
    }
    std::vector<double> rhs(n, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_banded(a, rhs));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BandedSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_SelfSimilarSolve(benchmark::State& state) {
    const double n = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(solve(n, 1.0).B);
}
BENCHMARK(BM_SelfSimilarSolve)->Arg(10)->Arg(20)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_TransientStep(benchmark::State& state) {
    StepConfig c;
    c.mesh_nodes = static_cast<std::size_t>(state.range(0));
    const ProblemParams p = unit(1.0, 1.0);
    const TransientState s = initial_state(InitialDatum::Fig1Bump, c);
    for (auto _ : state) {
        const StepSolution sol = assemble_and_solve_step(s, p, c);
        const FrontVelocity v = reconstruct_front_velocity(s, sol.force, sol.hdot, p, c);
        benchmark::DoNotOptimize(ale_update(s, v, sol.hdot, c.tau));
    }
}
BENCHMARK(BM_TransientStep)->Arg(101)->Arg(201)->Arg(401)->Arg(801);

void BM_StrongPrediction(benchmark::State& state) {
    const Grid1D g = Grid1D::graded(0.0, 1.0, 400, 0.99);
    const double n = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(strong_prediction(unit(n, 0.5), g).gamma);
}
BENCHMARK(BM_StrongPrediction)->Arg(10)->Arg(15)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_WeakPrediction(benchmark::State& state) {
    const Grid1D g = Grid1D::graded(0.0, 1.0, 400, 0.99);
    for (auto _ : state) benchmark::DoNotOptimize(weak_prediction(unit(1.25, 2.0), g).gamma);
}
BENCHMARK(BM_WeakPrediction)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
