#include <benchmark/benchmark.h>

#include "eroscan/augment.hpp"

using namespace eroscan;

namespace {

void BM_Rotate90(benchmark::State& state) {
  Raster r(640, 640, 3, std::uint8_t{3});
  for (auto _ : state) benchmark::DoNotOptimize(rotate90(r, 1));
}
BENCHMARK(BM_Rotate90);

void BM_Zoom(benchmark::State& state) {
  Raster r(640, 640, 3, std::uint8_t{3});
  for (auto _ : state) benchmark::DoNotOptimize(zoom(r, 1.5));
}
BENCHMARK(BM_Zoom);

}  // namespace
