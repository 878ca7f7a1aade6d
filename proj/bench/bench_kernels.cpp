#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lglab/kernels.hpp"
#include "lglab/laplacian.hpp"
#include "lglab/sphere_grid.hpp"

using namespace lglab;

namespace {

std::vector<double> smooth_field(const SphereGrid& g) {
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    f[k] = 0.1 * std::cos(g.theta(g.row(k))) * std::sin(2.0 * g.phi(g.col(k)));
  }
  return f;
}

template <bool Omp>
void BM_ApplyStencil(benchmark::State& state) {
  const SphereGrid g(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  const LaplacianOperator op(g);
  const auto f = smooth_field(g);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::omp::apply_stencil(op, f, out);
    } else {
      kernels::serial::apply_stencil(op, f, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

template <bool Omp>
void BM_GaussCurvature(benchmark::State& state) {
  const SphereGrid g(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  const auto u = smooth_field(g);
  const auto lap = smooth_field(g);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::omp::gauss_curvature(u, lap, out);
    } else {
      kernels::serial::gauss_curvature(u, lap, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

template <bool Omp>
void BM_WeightedVolume(benchmark::State& state) {
  const SphereGrid g(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  const auto u = smooth_field(g);
  const std::vector<double> w(g.size(), 0.5);
  for (auto _ : state) {
    double v = Omp ? kernels::omp::weighted_volume(g, u, w) : kernels::serial::weighted_volume(g, u, w);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

template <bool Omp>
void BM_DistancesTo(benchmark::State& state) {
  const SphereGrid g(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  const Vec3 c{0.6, 0.0, 0.8};
  std::vector<double> out(g.size());
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::omp::distances_to(g, c, out);
    } else {
      kernels::serial::distances_to(g, c, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

}  // namespace

BENCHMARK(BM_ApplyStencil<false>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_ApplyStencil<true>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_GaussCurvature<false>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_GaussCurvature<true>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_WeightedVolume<false>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_WeightedVolume<true>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_DistancesTo<false>)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_DistancesTo<true>)->Arg(128)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
