#include <random>

#include <benchmark/benchmark.h>

#include "hoiforge/geometry.hpp"
#include "hoiforge/hoieval.hpp"
#include "hoiforge/hungarian.hpp"
#include "hoiforge/setmatch.hpp"

using namespace hoiforge;

static void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 10.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hungarian(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_Giou(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> p(0, 100), s(1, 40);
  std::vector<BBox> boxes;
  for (int i = 0; i < 1024; ++i) {
    const double x = p(rng), y = p(rng);
    boxes.push_back({x, y, x + s(rng), y + s(rng)});
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(giou(boxes[k & 1023], boxes[(k * 7 + 3) & 1023]));
    ++k;
  }
}
BENCHMARK(BM_Giou);

static void BM_MatchAndScore(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0.2, 0.8), s(0.05, 0.3);
  std::normal_distribution<double> g(0, 1);
  auto box = [&] { return CenterBox{c(rng), c(rng), s(rng), s(rng)}; };
  auto mat = [&](std::size_t r, std::size_t k) {
    Matrix m(r, k);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = g(rng);
    return m;
  };
  PredictionSet pred;
  GroundTruthSet gt;
  for (std::size_t i = 0; i < n; ++i) {
    pred.human_boxes.push_back(box());
    pred.object_boxes.push_back(box());
  }
  for (std::size_t i = 0; i < n / 4 + 1; ++i) gt.entries.push_back({box(), box(), static_cast<int>(i % 80), static_cast<int>(i % 600)});
  pred.object_dist = classifier_distribution(mat(n, 64), mat(80, 64));
  pred.interaction_dist = classifier_distribution(mat(n, 64), mat(600, 64));
  for (auto _ : state) benchmark::DoNotOptimize(match_and_score(pred, gt, {}));
}
BENCHMARK(BM_MatchAndScore)->Arg(64)->Arg(100);

static void BM_MapReport(benchmark::State& state) {
  const auto images = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> p(0, 400), s(10, 100), score(0, 1);
  std::vector<EvalGroundTruth> gts;
  std::vector<EvalPrediction> preds;
  for (int i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    for (int k = 0; k < 3; ++k) {
      const double x = p(rng), y = p(rng);
      const BBox h{x, y, x + s(rng), y + s(rng)}, o{y, x, y + s(rng), x + s(rng)};
      const int c = static_cast<int>(rng() % 600);
      gts.push_back({id, h, o, c});
      preds.push_back({id, h, o, c, score(rng)});
      preds.push_back({id, o, h, static_cast<int>(rng() % 600), score(rng)});
    }
  }
  EvalSettings settings;
  settings.num_categories = 600;
  for (auto _ : state) benchmark::DoNotOptimize(map_report(preds, gts, settings));
}
BENCHMARK(BM_MapReport)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
