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

#include <benchmark/benchmark.h>

#include "monoloc/locality_reg.hpp"
#include "monoloc/toy_trainer.hpp"

namespace {

using monoloc::FeatureBatch;
using monoloc::LinearHead;

struct Instance {
  FeatureBatch batch;
  LinearHead head;
};

Instance Make(Eigen::Index m, Eigen::Index n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0), z(5.0, 80.0);
  Instance in;
  in.batch.x = Eigen::MatrixXd::NullaryExpr(n, m, [&] { return g(rng); });
  in.batch.u2d = Eigen::VectorXd::NullaryExpr(m, [&] { return u(rng); });
  in.batch.z3d = Eigen::VectorXd::NullaryExpr(m, [&] { return z(rng); });
  in.head = LinearHead::Zero(n);
  in.head.w = Eigen::Matrix<double, 2, Eigen::Dynamic>::NullaryExpr(2, n, [&] { return g(rng); });
  return in;
}

void BM_BuildGraph(benchmark::State& state) {
  const auto in = Make(state.range(0), 16);
  for (auto _ : state) benchmark::DoNotOptimize(monoloc::build_graph(in.batch));
}
BENCHMARK(BM_BuildGraph)->RangeMultiplier(4)->Range(8, 512);

void BM_RegPairwise(benchmark::State& state) {
  const auto in = Make(state.range(0), 16);
  const auto g = monoloc::build_graph(in.batch);
  for (auto _ : state) benchmark::DoNotOptimize(monoloc::reg_pairwise(in.head, in.batch, g));
}
BENCHMARK(BM_RegPairwise)->RangeMultiplier(4)->Range(8, 512);

void BM_RegTrace(benchmark::State& state) {
  const auto in = Make(state.range(0), 16);
  const auto g = monoloc::build_graph(in.batch);
  for (auto _ : state) benchmark::DoNotOptimize(monoloc::reg_trace(in.head, in.batch, g));
}
BENCHMARK(BM_RegTrace)->RangeMultiplier(4)->Range(8, 512);

void BM_RegGradient(benchmark::State& state) {
  const auto in = Make(state.range(0), 16);
  const auto g = monoloc::build_graph(in.batch);
  for (auto _ : state) benchmark::DoNotOptimize(monoloc::reg_gradient(in.head, in.batch, g));
}
BENCHMARK(BM_RegGradient)->RangeMultiplier(4)->Range(8, 512);

void BM_TrainToy(benchmark::State& state) {
  const auto scene = monoloc::generate_scene(50, 8, 0.1, 1);
  monoloc::TrainConfig cfg;
  cfg.epochs = static_cast<int>(state.range(0));
  cfg.use_regularizer = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(monoloc::train(scene, monoloc::LossConfig{}, cfg));
  }
}
BENCHMARK(BM_TrainToy)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
