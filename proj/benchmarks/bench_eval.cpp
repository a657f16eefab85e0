#include <benchmark/benchmark.h>

#include <random>

#include "eroscan/eval.hpp"

using namespace eroscan;

namespace {

Annotation random_box(std::mt19937_64& rng, int cls) {
  std::uniform_real_distribution<double> u(0.0, 0.8);
  const double x = u(rng), y = u(rng);
  Annotation a;
  a.class_id = cls;
  a.bbox = BBox::from_corners(x, y, x + 0.05 + u(rng) / 4, y + 0.05 + u(rng) / 4);
  return a;
}

std::vector<EvalImage> make_images(int count, int per_image) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::vector<EvalImage> images;
  for (int i = 0; i < count; ++i) {
    EvalImage img{"img" + std::to_string(i), 640, 640, {}, {}};
    for (int k = 0; k < per_image; ++k) {
      img.gts.push_back(random_box(rng, k % 5));
      auto p = random_box(rng, (k + i) % 5);
      p.confidence = conf(rng);
      img.preds.push_back(p);
    }
    images.push_back(std::move(img));
  }
  return images;
}

void BM_Evaluate(benchmark::State& state) {
  const auto images = make_images(static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(1)));
  const auto classes = ClassMap::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(images, classes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Args({72, 10})->Args({500, 20});

}  // namespace
