#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "catastrank/cusp_fit.hpp"
#include "catastrank/cusp_model.hpp"
#include "catastrank/dataset.hpp"
#include "catastrank/regress.hpp"
#include "catastrank/relief.hpp"
#include "catastrank/rng.hpp"

namespace {

using catastrank::CuspParams;
using catastrank::Dataset;
using catastrank::Rng;

Dataset synthetic(int n, int p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (double& v : col) v = rng.next_double();
        names.push_back("f" + std::to_string(j + 1));
        cols.push_back(std::move(col));
    }
    std::vector<double> y(n);
    for (int t = 0; t < n; ++t) y[t] = cols[0][t] + 0.1 * rng.next_normal();
    names.push_back("y");
    cols.push_back(std::move(y));
    return Dataset::from_columns(std::move(names), std::move(cols), p);
}

void BM_LogNormalizer(benchmark::State& state, CuspParams p) {
    for (auto _ : state) benchmark::DoNotOptimize(catastrank::log_normalizer(p));
}
BENCHMARK_CAPTURE(BM_LogNormalizer, origin, CuspParams{0.0, 0.0});
BENCHMARK_CAPTURE(BM_LogNormalizer, bimodal, CuspParams{0.0, 3.0});
BENCHMARK_CAPTURE(BM_LogNormalizer, tilted, CuspParams{10.0, 1.0});
BENCHMARK_CAPTURE(BM_LogNormalizer, single_well, CuspParams{2.0, -2.0});

void BM_CuspMoments(benchmark::State& state) {
    const CuspParams p{0.0, 3.0};
    for (auto _ : state) benchmark::DoNotOptimize(catastrank::cusp_moments(p));
}
BENCHMARK(BM_CuspMoments);

void BM_Equilibria(benchmark::State& state) {
    Rng rng(1);
    std::vector<CuspParams> pts(256);
    for (auto& p : pts)
        p = {{-5.0 + 10.0 * rng.next_double()}, {-5.0 + 10.0 * rng.next_double()}};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(catastrank::equilibria(pts[i]));
        i = (i + 1) & 255;
    }
}
BENCHMARK(BM_Equilibria);

void BM_NllGradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset ds = synthetic(n, 2, 7);
    const catastrank::CuspRegressionSpec spec{{}, {1}, {2}};
    const std::vector<double> params{0.0, 1.0, 0.2, 0.5, 1.0, -0.5};
    for (auto _ : state)
        benchmark::DoNotOptimize(catastrank::nll_value_and_gradient(ds, spec, params));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_NllGradient)->Arg(100)->Arg(500);

void BM_CuspFit(benchmark::State& state) {
    const Dataset ds = synthetic(static_cast<int>(state.range(0)), 2, 7);
    const catastrank::CuspRegressionSpec spec{{}, {1}, {2}};
    for (auto _ : state)
        benchmark::DoNotOptimize(catastrank::fit(ds, spec, std::nullopt, 42));
}
BENCHMARK(BM_CuspFit)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Relief(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset ds = synthetic(n, 10, 11);
    for (auto _ : state)
        benchmark::DoNotOptimize(catastrank::relief_rank(ds, n, 0.0, 2, 1));
}
BENCHMARK(BM_Relief)->Arg(100)->Arg(400);

void BM_FitLinear(benchmark::State& state) {
    const Dataset ds = synthetic(500, 10, 13);
    for (auto _ : state) benchmark::DoNotOptimize(catastrank::fit_linear(ds));
}
BENCHMARK(BM_FitLinear);

void BM_PredictKnn(benchmark::State& state) {
    const Dataset ds = synthetic(500, 10, 17);
    const catastrank::KnnModel model = catastrank::fit_knn(ds, 3);
    const std::vector<double> query(10, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(catastrank::predict_knn(model, query));
}
BENCHMARK(BM_PredictKnn);

void BM_FitTree(benchmark::State& state) {
    const Dataset ds = synthetic(500, 10, 19);
    for (auto _ : state)
        benchmark::DoNotOptimize(catastrank::fit_tree(ds, 0.2, 5, 42));
}
BENCHMARK(BM_FitTree);

}  // namespace

BENCHMARK_MAIN();
