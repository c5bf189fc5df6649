#include <benchmark/benchmark.h>

#include <numbers>

#include "qbench/classical.hpp"
#include "qbench/dimred.hpp"
#include "qbench/quantum.hpp"
#include "qbench/rng.hpp"

namespace {

qbench::Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  qbench::Rng rng(seed);
  qbench::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

qbench::DataTable random_table(std::size_t n, std::size_t d, std::uint64_t seed) {
  qbench::Rng rng(seed);
  qbench::DataTable t;
  t.features = qbench::Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    t.labels.push_back(rng.uniform() < 0.3);
    for (std::size_t j = 0; j < d; ++j) t.features(i, j) = rng.normal() + (t.labels[i] ? 0.5 : 0.0);
  }
  return t;
}

void BM_EigSymmetric(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(qbench::eig_symmetric(a));
}
BENCHMARK(BM_EigSymmetric)->Arg(23)->Arg(114)->Unit(benchmark::kMillisecond);

void BM_Svd(benchmark::State& state) {
  const auto t = random_table(800, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(qbench::svd(t.features));
}
BENCHMARK(BM_Svd)->Arg(23)->Arg(114)->Unit(benchmark::kMillisecond);

void BM_FitReducer(benchmark::State& state) {
  const auto t = random_table(720, 23, 3);
  const auto method = static_cast<qbench::ReductionMethod>(state.range(0));
  for (auto _ : state) {
    switch (method) {
      case qbench::ReductionMethod::kPca: benchmark::DoNotOptimize(qbench::fit_pca(t, 2)); break;
      case qbench::ReductionMethod::kSkpp: benchmark::DoNotOptimize(qbench::fit_skpp(t, 2, {})); break;
      default: benchmark::DoNotOptimize(qbench::fit_lda_split(t, 0)); break;
    }
  }
  state.SetLabel(std::string(qbench::to_string(method)));
}
BENCHMARK(BM_FitReducer)
    ->Arg(static_cast<int>(qbench::ReductionMethod::kPca))
    ->Arg(static_cast<int>(qbench::ReductionMethod::kSkpp))
    ->Arg(static_cast<int>(qbench::ReductionMethod::kLdaSplit))
    ->Unit(benchmark::kMillisecond);

void BM_ZzEncode(benchmark::State& state) {
  const qbench::FeatureMapSpec spec{};
  const std::vector<double> x{0.3, 1.9};
  for (auto _ : state) benchmark::DoNotOptimize(qbench::encode_zz(x, spec));
}
BENCHMARK(BM_ZzEncode);

void BM_QuantumGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  qbench::Rng rng(4);
  qbench::Matrix x(n, 2);
  for (auto& v : x.data()) v = rng.uniform(0, std::numbers::pi);
  for (auto _ : state) benchmark::DoNotOptimize(qbench::quantum_kernel(x, qbench::FeatureMapSpec{}));
}
BENCHMARK(BM_QuantumGram)->Arg(100)->Arg(720)->Unit(benchmark::kMillisecond);

void BM_TrainSvm(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)), 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(qbench::train_svm(t));
}
BENCHMARK(BM_TrainSvm)->Arg(200)->Arg(720)->Unit(benchmark::kMillisecond);

void BM_VqcGradient(benchmark::State& state) {
  auto t = random_table(static_cast<std::size_t>(state.range(0)), 2, 6);
  const auto targets = qbench::vqc_targets(t.labels);
  const auto m = qbench::init_vqc(2, 4, 7);
  for (auto _ : state) benchmark::DoNotOptimize(qbench::vqc_gradient(m, t.features, targets));
}
BENCHMARK(BM_VqcGradient)->Arg(100)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
