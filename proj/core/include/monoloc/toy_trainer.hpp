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

// Desk-scale experiment harness: synthetic single-image scenes and
// full-batch momentum SGD for the linear centre head, with and without the
// locality regulariser.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "monoloc/kitti_io.hpp"
#include "monoloc/locality_reg.hpp"
#include "monoloc/losses.hpp"

namespace monoloc {

struct SceneObject {
  Eigen::VectorXd features;
  double u2d_norm = 0.0;  // image u / image width
  double u3d = 0.0;
  double z3d = 0.0;
};

struct SyntheticScene {
  std::vector<SceneObject> objects;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(objects.size()); }
  FeatureBatch batch() const;
  // 2 x M ground truth, rows (u3d, z3d).
  Eigen::Matrix<double, 2, Eigen::Dynamic> targets() const;
};

// Synthetic camera shared by every generated scene.
struct SceneCamera {
  static constexpr double kFocal = 721.5377;
  static constexpr double kTheta = 609.5593;
  static constexpr double kPhi = 172.854;
  static constexpr double kImageWidth = 1242.0;
  static constexpr double kCameraHeight = 1.65;  // y of the road plane
  static CameraCalibration calibration();
};

/// Ground truth: u3d ~ U[-15, 15] m, z3d ~ U[5, 80] m. Features are
/// E * (u3d / 2, z3d / 8) + noise_sigma * N(0, I), where E (feature_dim x 2)
/// is a fixed Gaussian matrix shared by all scenes. Throws DomainError for
/// n_objects < 1, feature_dim < 2 or negative noise.
SyntheticScene generate_scene(std::size_t n_objects, std::size_t feature_dim,
                              double noise_sigma, std::uint64_t seed);

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 20000;
  double momentum = 0.9;
  double tolerance = 0.5;  // mean per-object L1, metres
  bool use_regularizer = true;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::optional<int> epochs_to_tolerance;
  double final_l1 = 0.0;
  std::size_t neighbor_order_violations = 0;
  std::vector<double> loss_curve;
  LossConfig loss;
  TrainConfig train;
  std::size_t n_objects = 0;
  std::size_t feature_dim = 0;
  double noise_sigma = 0.0;
  std::uint64_t scene_seed = 0;
};

struct TrainResult {
  LinearHead head;
  TrainReport report;
};

/// Minimises, per object,
///   J(W, b) = (1/M) * [ sum_i |W x_i + b - y_i|_1 + R(W) / M^2 ]
/// where R is the locality regulariser (omitted when disabled or beta == 0).
/// Full-batch heavy-ball steps with a learning rate decaying linearly to 0.
/// W starts from N(0, 0.01^2) drawn from `cfg.seed`, b from zero.
/// Throws DivergenceError once J exceeds 1e12 or stops being finite.
TrainResult train(const SyntheticScene& scene, const LossConfig& loss,
                  const TrainConfig& cfg);

// Mean per-object L1 of the head on the scene.
double mean_l1(const LinearHead& head, const SyntheticScene& scene);

/// Pairs with |dz| < sqrt(lambda) / 2 whose predicted horizontal order is the
/// reverse of the true order.
std::size_t neighbor_order_violations(const LinearHead& head, const SyntheticScene& scene,
                                      double lambda = kDefaultLambda);

nlohmann::ordered_json to_json(const TrainReport& report);

struct ArmSummary {
  std::vector<TrainReport> reports;  // one per seed, in seed order
  double mean_violations = 0.0;
  // Runs that never reach tolerance count as the full epoch budget.
  double mean_epochs_to_tolerance = 0.0;
  std::size_t not_reached = 0;
  double mean_final_l1 = 0.0;
};

struct PairedExperiment {
  std::optional<ArmSummary> regularized;
  ArmSummary unregularized;
};

struct PairedConfig {
  std::size_t n_objects = 50;
  std::size_t feature_dim = 8;
  double noise_sigma = 0.1;
  std::vector<std::uint64_t> seeds;
  LossConfig loss;
  TrainConfig train;  // use_regularizer is set per arm
  bool run_regularized = true;
};

/// Trains both arms on the same scene for every seed (scene seed and
/// initialisation seed are both the listed seed). Single-threaded.
PairedExperiment run_paired_experiment(const PairedConfig& cfg);

nlohmann::ordered_json to_json(const ArmSummary& arm, bool include_reports = true);

}  // namespace monoloc
