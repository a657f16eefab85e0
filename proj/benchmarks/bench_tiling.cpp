#include <benchmark/benchmark.h>

#include "eroscan/tiling.hpp"

using namespace eroscan;

namespace {

void BM_TileByGroundSize(benchmark::State& state) {
  Raster r(1500, 1500, 3, std::uint8_t{90});
  set_gsd_from_extent(r, 1500.0);
  for (auto _ : state) benchmark::DoNotOptimize(tile_by_ground_size(r, 250.0));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(r.data().size()));
}
BENCHMARK(BM_TileByGroundSize);

void BM_GridRoundTrip(benchmark::State& state) {
  Raster r(2000, 2000, 3, std::uint8_t{17});
  for (auto _ : state) benchmark::DoNotOptimize(stitch(tile_grid(r, 7, 7)));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(r.data().size()));
}
BENCHMARK(BM_GridRoundTrip);

}  // namespace
