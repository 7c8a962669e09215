#include "netgames/diagnostics.hpp"
#include "netgames/network.hpp"

#include <benchmark/benchmark.h>

using namespace netgames;

static void BM_SpectralMeasures(benchmark::State& state) {
    const Network net = Network::complete(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_measures(net));
    }
}
BENCHMARK(BM_SpectralMeasures)->Arg(10)->Arg(30)->Arg(60);

static void BM_PMatrixEnumeration(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const Matrix a = 2.0 * Matrix::Identity(d, d) - (1.0 / d) * Network::complete(d).weights();
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_p_matrix(a));
    }
}
BENCHMARK(BM_PMatrixEnumeration)->Arg(8)->Arg(12)->Arg(14);

static void BM_Certify(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    LinearQuadraticFamily fam;
    for (int i = 0; i < n; ++i) {
        fam.Q.push_back(Matrix::Identity(1, 1));
        fam.K.push_back(Matrix::Constant(1, 1, 0.3));
        fam.a.push_back(Vector::Ones(1));
    }
    GameSpec spec(Network::complete(n), fam, {ConstraintSet::nonneg(1)});
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify(spec));
    }
}
BENCHMARK(BM_Certify)->Arg(6)->Arg(10);
