#include <benchmark/benchmark.h>

#include "tda/complex.hpp"
#include "tda/persistence.hpp"
#include "tda/pointcloud.hpp"
#include "tda/random.hpp"
#include "tda/stats.hpp"
#include "tda/summaries.hpp"

namespace {

tda::DistanceMatrix wedge_distances(std::size_t points) {
  const auto cloud = tda::sample_wedge_of_circles(tda::wedge_counts(2, points), 1.0, 0.05, 7, 5);
  return tda::pairwise_distances(cloud);
}

void BM_VietorisRips(benchmark::State& state) {
  const auto dm = wedge_distances(static_cast<std::size_t>(state.range(0)));
  const double cap = tda::enclosing_radius(dm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tda::vietoris_rips(dm, 2, cap));
  }
}
BENCHMARK(BM_VietorisRips)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Reduction(benchmark::State& state) {
  const auto dm = wedge_distances(static_cast<std::size_t>(state.range(0)));
  const auto f = tda::vietoris_rips(dm, 2, tda::enclosing_radius(dm));
  const auto matrix = tda::boundary_matrix(f);
  const bool dual = state.range(1) != 0;
  for (auto _ : state) {
    if (dual) {
      benchmark::DoNotOptimize(tda::reduce_dual(matrix));
    } else {
      benchmark::DoNotOptimize(tda::reduce(matrix));
    }
  }
  state.SetLabel(dual ? "cohomology" : "homology");
}
BENCHMARK(BM_Reduction)->Args({50, 0})->Args({50, 1})->Args({100, 0})->Args({100, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Landscape(benchmark::State& state) {
  tda::Rng rng(3);
  std::vector<tda::PersistencePair> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const double b = rng.uniform(0, 2);
    pts.push_back({b, b + rng.uniform(0.01, 1.0)});
  }
  const tda::PersistenceDiagram d(1, pts);
  for (auto _ : state) {
    const auto ls = tda::landscape(d);
    benchmark::DoNotOptimize(tda::vectorize_landscape(ls, {}));
  }
}
BENCHMARK(BM_Landscape)->Arg(20)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_PermutationTest(benchmark::State& state) {
  tda::Rng rng(5);
  const auto per_group = static_cast<std::size_t>(state.range(0));
  std::vector<tda::FeatureVector> a(per_group), b(per_group);
  for (auto* g : {&a, &b}) {
    for (auto& v : *g) {
      v.values.resize(24060);
      for (double& x : v.values) x = rng.uniform();
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(tda::permutation_test(a, b, {}));
  }
}
BENCHMARK(BM_PermutationTest)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
