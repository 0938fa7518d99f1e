// Micro-benchmarks for the pipeline's hot stages. Run as
//   ./benchmarks/rpbof_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "rpbof/codebook.hpp"
#include "rpbof/dense_sift.hpp"
#include "rpbof/dtw.hpp"
#include "rpbof/recurrence.hpp"
#include "rpbof/synthetic.hpp"

namespace {

using namespace rpbof;

TimeSeries random_series(int length, std::uint64_t seed) {
  Rng rng(seed);
  TimeSeries ts;
  ts.values.resize(static_cast<std::size_t>(length));
  for (auto& v : ts.values) v = rng.normal();
  return ts;
}

Eigen::MatrixXd random_descriptors(int n, int dims, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, dims);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dims; ++j) m(i, j) = std::abs(rng.normal());
    m.row(i).normalize();
  }
  return m;
}

void BM_EncodeSeries(benchmark::State& state) {
  const auto ts = random_series(static_cast<int>(state.range(0)), 1);
  const EmbeddingParams p;
  for (auto _ : state) {
    auto img = encode_series(ts, p, 300);
    benchmark::DoNotOptimize(img.pixels.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EncodeSeries)->Arg(128)->Arg(300)->Arg(600)->Complexity();

void BM_DenseDescriptors(benchmark::State& state) {
  const auto ts = random_series(static_cast<int>(state.range(0)) + 8, 2);
  const auto img = encode_series(ts, {}, 300);
  const PatchGridParams grid;
  for (auto _ : state) {
    auto set = dense_descriptors(img, grid);
    benchmark::DoNotOptimize(set.vectors.data());
  }
}
BENCHMARK(BM_DenseDescriptors)->Arg(64)->Arg(128)->Arg(292);

void BM_KmeansIteration(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto bag = random_descriptors(8192, 128, 3);
  for (auto _ : state) {
    auto cb = kmeans(bag, M, 1, 7);
    benchmark::DoNotOptimize(cb.words.data());
  }
}
BENCHMARK(BM_KmeansIteration)->Arg(50)->Arg(250)->Arg(1000);

void BM_LlcCode(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto bag = random_descriptors(M + 64, 128, 4);
  const Codebook cb = kmeans(bag, M, 10, 5);
  const auto queries = random_descriptors(64, 128, 6);
  const LlcParams p;
  int i = 0;
  for (auto _ : state) {
    auto code = llc_code(queries.row(i % 64).transpose(), cb, p);
    benchmark::DoNotOptimize(code.data());
    ++i;
  }
}
BENCHMARK(BM_LlcCode)->Arg(50)->Arg(250)->Arg(1000);

void BM_RegularizedCode(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto bag = random_descriptors(M + 64, 128, 8);
  const Codebook cb = kmeans(bag, M, 10, 9);
  const auto queries = random_descriptors(16, 128, 10);
  LlcParams p;
  p.sigma = auto_sigma(bag, cb);
  int i = 0;
  for (auto _ : state) {
    auto code = llc_code_regularized(queries.row(i % 16).transpose(), cb, p);
    benchmark::DoNotOptimize(code.data());
    ++i;
  }
}
BENCHMARK(BM_RegularizedCode)->Arg(50)->Arg(100)->Arg(250);

void BM_Dtw(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto a = random_series(l, 11);
  const auto b = random_series(l, 12);
  for (auto _ : state)
    benchmark::DoNotOptimize(dtw_distance(a.values, b.values));
  state.SetComplexityN(l);
}
BENCHMARK(BM_Dtw)->Arg(128)->Arg(512)->Arg(1024)->Complexity();

void BM_DtwBanded(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto a = random_series(l, 13);
  const auto b = random_series(l, 14);
  for (auto _ : state)
    benchmark::DoNotOptimize(dtw_distance(a.values, b.values, 0.1));
}
BENCHMARK(BM_DtwBanded)->Arg(128)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
