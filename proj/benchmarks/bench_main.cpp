#include <benchmark/benchmark.h>

#include "attnpca/attention.hpp"
#include "attnpca/classify.hpp"
#include "attnpca/facespace.hpp"
#include "attnpca/rng.hpp"
#include "attnpca/stats.hpp"
#include "attnpca/synth.hpp"

using namespace attnpca;

namespace {

DataMatrix gaussian_data(Eigen::Index samples, int side) {
    Rng rng(1);
    Eigen::MatrixXd x(samples, side * side);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 128.0 + 30.0 * rng.normal();
    return DataMatrix(std::move(x), {}, ImageGeometry{side, side});
}

// N samples of 64x64 images.
void BM_FitPca(benchmark::State& state) {
    const DataMatrix d = gaussian_data(state.range(0), 64);
    for (auto _ : state) benchmark::DoNotOptimize(fit_pca_all(d));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitPca)->RangeMultiplier(2)->Range(50, 400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_FitDpca(benchmark::State& state) {
    const DataMatrix d = gaussian_data(state.range(0), 64);
    const AttentionMap w = random_uniform_map(64 * 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fit_dpca_full(d, w));
}
BENCHMARK(BM_FitDpca)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_TrainClassifier(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    Rng rng(3);
    Eigen::MatrixXd y(360, m);
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 0; j < m; ++j) y(i, j) = rng.normal() + (i % 2 ? 0.5 : 0.0);
        labels.push_back(i % 2 ? "f" : "m");
    }
    for (auto _ : state) benchmark::DoNotOptimize(train(y, labels));
}
BENCHMARK(BM_TrainClassifier)->Arg(20)->Arg(120)->Arg(240)->Unit(benchmark::kMicrosecond);

void BM_Wilcoxon(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(a, b));
}
BENCHMARK(BM_Wilcoxon)->Arg(10)->Arg(120)->Arg(400)->Arg(2000);

void BM_HeatMap(benchmark::State& state) {
    Rng rng(5);
    std::vector<Fixation> f(static_cast<std::size_t>(state.range(0)));
    for (auto& x : f) x = Fixation{rng.uniform(0, 512), rng.uniform(0, 512), 0.0, 200.0, 60};
    for (auto _ : state) benchmark::DoNotOptimize(accumulate_heatmap(f, 512, 512, 25.0));
}
BENCHMARK(BM_HeatMap)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Synthetic(benchmark::State& state) {
    const SynthSpec spec;
    for (auto _ : state) benchmark::DoNotOptimize(generate_synthetic(spec, 7));
}
BENCHMARK(BM_Synthetic)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
