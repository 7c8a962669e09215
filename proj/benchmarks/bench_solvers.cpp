#include "netgames/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace netgames;

namespace {

GameSpec race(int n, double gamma) {
    RacesFamily fam;
    fam.lower = Vector::Constant(n, 1.0);
    fam.upper = Vector::Constant(n, 5.0);
    fam.gamma = gamma;
    return GameSpec(Network::complete(n, 1.0 / (n - 1)), std::move(fam),
                    {ConstraintSet::box(Vector::Constant(1, 1.0), Vector::Constant(1, 5.0))});
}

}  // namespace

static void BM_SequentialBr(benchmark::State& state) {
    GameSpec spec = race(static_cast<int>(state.range(0)), 0.15);
    DynamicsConfig cfg;
    cfg.mode = DynamicsMode::DiscreteSequential;
    cfg.max_iters = 20000;
    cfg.residual_tol = 1e-10;
    const Vector x0 = spec.project_profile(Vector::Zero(spec.profile_dim()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(discrete_br(spec, x0, cfg));
    }
}
BENCHMARK(BM_SequentialBr)->Arg(4)->Arg(16);

static void BM_ContinuousBr(benchmark::State& state) {
    GameSpec spec = race(static_cast<int>(state.range(0)), 0.15);
    DynamicsConfig cfg;
    cfg.mode = DynamicsMode::ContinuousRk4;
    cfg.residual_tol = 1e-9;
    const Vector x0 = spec.project_profile(Vector::Zero(spec.profile_dim()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(continuous_br(spec, x0, cfg));
    }
}
BENCHMARK(BM_ContinuousBr)->Arg(4)->Arg(16);

static void BM_BruteForce(benchmark::State& state) {
    GameSpec spec = race(2, 0.6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_nash(spec, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_BruteForce)->Arg(100)->Arg(400);
