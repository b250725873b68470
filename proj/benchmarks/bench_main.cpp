#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "slitcarpet/geodesics.hpp"
#include "slitcarpet/measure.hpp"
#include "slitcarpet/modulus.hpp"
#include "slitcarpet/symmetry.hpp"

using namespace slitcarpet;

namespace {

CarpetPoint corner_point(const char* x, const char* y) {
  return CarpetPoint{Coord::parse(x), Coord::parse(y), std::nullopt, std::nullopt};
}

void BM_SlitSchedule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SlitSchedule::up_to(n).size());
}
BENCHMARK(BM_SlitSchedule)->DenseRange(2, 8, 2);

void BM_DistanceLevel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = corner_point("1/8", "3/16");
  const auto q = corner_point("7/8", "13/16");
  for (auto _ : state) benchmark::DoNotOptimize(geodesics::distance_level(n, p, q).length);
}
BENCHMARK(BM_DistanceLevel)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

void BM_GridBall(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const auto p = corner_point("3/16", "5/16");
  for (auto _ : state) benchmark::DoNotOptimize(geodesics::ball_distances(3, p, 0.5, g));
}
BENCHMARK(BM_GridBall)->DenseRange(6, 9)->Unit(benchmark::kMillisecond);

void BM_Conductance(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(modulus::conductance(3, g, modulus::Direction::LR));
}
BENCHMARK(BM_Conductance)->DenseRange(6, 9)->Unit(benchmark::kMillisecond);

void BM_BallMass(benchmark::State& state) {
  const auto p = corner_point("5/16", "5/8");
  for (auto _ : state) benchmark::DoNotOptimize(measure::ball_mass(3, p, 0.25, 7));
}
BENCHMARK(BM_BallMass)->Unit(benchmark::kMillisecond);

void BM_ShearApply(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto g = symmetry::random_element(rng, static_cast<int>(state.range(0)));
  std::uniform_int_distribution<std::int64_t> coord(0, 256);
  std::vector<CarpetPoint> pts;
  while (pts.size() < 256) {
    CarpetPoint p{Coord(Dyadic(coord(rng), 8)), Coord(Dyadic(coord(rng), 8)), std::nullopt, Copy::front};
    if (!p.on_outer_square() && !locate(p.x, p.y, 8).needs_side()) pts.push_back(p);
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(symmetry::qs_apply(g, pts[k++ % pts.size()]));
  }
}
BENCHMARK(BM_ShearApply)->Arg(4)->Arg(10);

void BM_Cohopf(benchmark::State& state) {
  const symmetry::QSElement g{symmetry::IsometryElement::identity(), symmetry::h0()};
  for (auto _ : state) benchmark::DoNotOptimize(symmetry::cohopf_check(g, static_cast<int>(state.range(0))).ok);
}
BENCHMARK(BM_Cohopf)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
