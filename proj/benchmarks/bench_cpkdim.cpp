#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <string>

#include "cpkdim/catalog.hpp"
#include "cpkdim/dimension.hpp"
#include "cpkdim/lyapunov.hpp"
#include "cpkdim/normal_forms.hpp"
#include "cpkdim/roots.hpp"
#include "cpkdim/sampler.hpp"
#include "cpkdim/volume.hpp"

using namespace cpkdim;

namespace {

const Catalog& catalog() {
  static const Catalog c = Catalog::load(CPKDIM_CATALOG);
  return c;
}

const ProjectiveMap& map_arg(const benchmark::State& state) {
  return catalog().get(catalog().names().at(state.range(0))).map;
}

const EmpiricalMeasure& cloud_for(const ProjectiveMap& f) {
  static std::map<std::string, EmpiricalMeasure> clouds;
  auto it = clouds.find(f.name());
  if (it == clouds.end()) {
    it = clouds.emplace(f.name(), sample_equilibrium(f, generic_point(f.k(), 3), 30, 20'000, 1)).first;
  }
  return it->second;
}

void name_maps(benchmark::internal::Benchmark* b) {
  for (int i = 0; i < 8; ++i) b->Arg(i);
}

}  // namespace

static void BM_PolynomialRoots(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cd> c(state.range(0) + 1);
  for (auto& x : c) x = {g(rng), g(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(polynomial_roots(c));
}
BENCHMARK(BM_PolynomialRoots)->DenseRange(2, 8, 2);

static void BM_Preimages(benchmark::State& state) {
  const auto& f = map_arg(state);
  const PreimageSolver solver(f);
  const auto y = generic_point(f.k(), 11);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(y));
  state.SetLabel(f.name());
}
BENCHMARK(BM_Preimages)->Apply(name_maps);

static void BM_SampleEquilibrium(benchmark::State& state) {
  const auto& f = map_arg(state);
  const auto a = generic_point(f.k(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(sample_equilibrium(f, a, 30, 1000, 2));
  state.SetItemsProcessed(state.iterations() * 1000);
  state.SetLabel(f.name());
}
BENCHMARK(BM_SampleEquilibrium)->Arg(0)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_ChartJacobian(benchmark::State& state) {
  const auto& f = map_arg(state);
  const auto p = generic_point(f.k(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(chart_jacobian(f, p));
  state.SetLabel(f.name());
}
BENCHMARK(BM_ChartJacobian)->Arg(0)->Arg(4);

static void BM_LyapunovSpectrum(benchmark::State& state) {
  const auto& f = map_arg(state);
  const auto& cloud = cloud_for(f);
  LyapunovOptions opt;
  opt.n_steps = 1000;
  opt.n_orbits = 20;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(f, cloud, opt));
  state.SetItemsProcessed(state.iterations() * opt.n_steps * opt.n_orbits);
  state.SetLabel(f.name());
}
BENCHMARK(BM_LyapunovSpectrum)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_LocalDimension(benchmark::State& state) {
  const auto& f = map_arg(state);
  const auto& cloud = cloud_for(f);
  const auto ladder = RadiusLadder::geometric(0.1, 0.8, 20);
  const auto x = cloud.points.front();
  for (auto _ : state) benchmark::DoNotOptimize(local_dimension(cloud, x, ladder, 0));
  state.SetItemsProcessed(state.iterations() * cloud.points.size());
  state.SetLabel(f.name());
}
BENCHMARK(BM_LocalDimension)->Arg(0)->Arg(4);

static void BM_DynamicalBallCount(benchmark::State& state) {
  const auto& f = map_arg(state);
  const auto& cloud = cloud_for(f);
  const DynamicalBallCounter counter(f, cloud, 8);
  const auto x = cloud.points.front();
  for (auto _ : state) benchmark::DoNotOptimize(counter.counts(x, 0.05, 0));
  state.SetItemsProcessed(state.iterations() * cloud.points.size());
  state.SetLabel(f.name());
}
BENCHMARK(BM_DynamicalBallCount)->Arg(0)->Arg(4);

static void BM_CurveArea(benchmark::State& state) {
  const auto& entry = catalog().get("power2_k2");
  const auto grid = QuadratureGrid::polar(128, 128, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(curve_area(entry.map, state.range(0), entry.discs.front().disc, grid));
}
BENCHMARK(BM_CurveArea)->Arg(0)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_GreenPotential(benchmark::State& state) {
  const auto& f = map_arg(state);
  const CVec z = generic_point(f.k(), 9).coords();
  for (auto _ : state) benchmark::DoNotOptimize(green_potential(f, z));
  state.SetLabel(f.name());
}
BENCHMARK(BM_GreenPotential)->Apply(name_maps);

static void BM_ExactComposition(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const std::vector<mpq_class> ratios = {mpq_class(27, 8), mpq_class(9, 4), mpq_class(3, 2)};
  const auto res = enumerate_resonances_exact(ratios);
  const auto r1 = random_exact_resonant_map(res, ratios, rng);
  const auto r2 = random_exact_resonant_map(res, ratios, rng);
  for (auto _ : state) benchmark::DoNotOptimize(compose_resonant(r1, r2, res));
}
BENCHMARK(BM_ExactComposition);

BENCHMARK_MAIN();
