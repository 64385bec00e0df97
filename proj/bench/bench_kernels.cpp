#include "cdtrade/discovery.hpp"
#include "cdtrade/forecast.hpp"
#include "cdtrade/kernels.hpp"
#include "cdtrade/synthetic.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

namespace {

Eigen::MatrixXd uniform_data(Eigen::Index rows, Eigen::Index cols) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng);
    return cdtrade::kernels::standardize(m);
}

void BM_PairScoresSerial(benchmark::State& state) {
    const auto data = uniform_data(2000, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cdtrade::kernels::pairwise_scores_serial(data));
    state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2 * 2000);
}

void BM_PairScores(benchmark::State& state) {
    const auto data = uniform_data(2000, state.range(0));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(cdtrade::kernels::pairwise_scores(data));
    state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2 * 2000);
}

void BM_VarLingam(benchmark::State& state) {
    cdtrade::GeneratorConfig g;
    g.n_vars = state.range(0);
    g.days = 2000;
    g.density = std::min(0.2, 0.5 / static_cast<double>(g.n_vars));
    g.seed = 1;
    const auto data = cdtrade::generate(g);
    for (auto _ : state) benchmark::DoNotOptimize(cdtrade::varlingam(data.panel, 1));
}

void BM_ExpandingForecast(benchmark::State& state) {
    cdtrade::GeneratorConfig g;
    g.n_vars = state.range(0);
    g.days = 1000;
    g.seed = 2;
    const auto data = cdtrade::generate(g);
    const auto graph = cdtrade::summary_graph(cdtrade::varlingam(data.panel, 1), 0.05);
    for (auto _ : state) {
        cdtrade::ExpandingForecaster f(graph, 1, 1);
        for (cdtrade::Index t = 800; t < 820; ++t) benchmark::DoNotOptimize(f.predict(data.panel, t));
    }
}

}  // namespace

BENCHMARK(BM_PairScoresSerial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairScores)->Args({10, 1})->Args({40, 1})->Args({40, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VarLingam)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpandingForecast)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
