/*
 * Copyright 2026 The monoloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "monoloc/commands.hpp"
#include "monoloc/evaluation.hpp"

namespace {

void BM_Iou3d(benchmark::State& state) {
  const auto pairs = monoloc::sample_box_pairs(256, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(monoloc::iou_3d(p.a, p.b));
  }
}
BENCHMARK(BM_Iou3d);

void BM_BevIou(benchmark::State& state) {
  const auto pairs = monoloc::sample_box_pairs(256, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(monoloc::bev_iou(p.a, p.b));
  }
}
BENCHMARK(BM_BevIou);

void BM_MonteCarloIou(benchmark::State& state) {
  const auto pairs = monoloc::sample_box_pairs(8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        monoloc::monte_carlo_iou_3d(pairs[1].a, pairs[1].b, static_cast<std::size_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_MonteCarloIou)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_AveragePrecision(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::bernoulli_distribution hit(0.6);
  std::vector<monoloc::MatchResult> frames(static_cast<std::size_t>(state.range(0)));
  std::size_t n_gt = 0;
  for (auto& m : frames) {
    for (std::size_t i = 0; i < 10; ++i) {
      m.scores.push_back(score(rng));
      if (hit(rng)) {
        m.pairs.push_back({i, i, 1.0});
      } else {
        m.unmatched_predictions.push_back(i);
      }
    }
    n_gt += 8;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(monoloc::average_precision(frames, n_gt));
  }
}
BENCHMARK(BM_AveragePrecision)->Arg(100)->Arg(3769);

}  // namespace
