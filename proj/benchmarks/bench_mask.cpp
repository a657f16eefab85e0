#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "eroscan/labelset.hpp"
#include "eroscan/mask.hpp"

using namespace eroscan;

namespace {

std::vector<NormPoint> star(int n) {
  std::vector<NormPoint> ring;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * i / n;
    const double r = i % 2 ? 0.2 : 0.45;
    ring.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});
  }
  return ring;
}

void BM_FillPolygon(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto ring = star(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    BinaryMask m(side, side);
    fill_polygon(m, ring);
    benchmark::DoNotOptimize(m.data().data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_FillPolygon)->Args({640, 16})->Args({640, 256})->Args({2048, 64});

void BM_RasterizeClasses(benchmark::State& state) {
  std::vector<Annotation> anns;
  for (int i = 0; i < state.range(0); ++i)
    anns.push_back(make_polygon_annotation(i % 5, star(8 + i % 24)));
  for (auto _ : state) {
    auto masks = rasterize_classes(anns, ClassMap::defaults(), 640, 640);
    benchmark::DoNotOptimize(masks);
  }
}
BENCHMARK(BM_RasterizeClasses)->Arg(10)->Arg(100);

void BM_MaskArea(benchmark::State& state) {
  BinaryMask m(1024, 1024);
  fill_polygon(m, star(32));
  for (auto _ : state) benchmark::DoNotOptimize(area(m, PixelScale::area(0.25)));
}
BENCHMARK(BM_MaskArea);

}  // namespace
