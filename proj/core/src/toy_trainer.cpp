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

#include "monoloc/toy_trainer.hpp"

#include <cmath>
#include <random>
#include <string>

#include "monoloc/error.hpp"
#include "monoloc/geometry.hpp"
#include "monoloc/json_util.hpp"

namespace monoloc {

namespace {

constexpr std::uint64_t kEmbeddingSeed = 20260101ull;
constexpr double kDivergenceLimit = 1e12;
constexpr double kInitScale = 1e-2;

Eigen::MatrixXd Embedding(std::size_t feature_dim) {
  std::mt19937_64 rng(kEmbeddingSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e(static_cast<Eigen::Index>(feature_dim), 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    for (Eigen::Index r = 0; r < e.rows(); ++r) e(r, c) = normal(rng);
  }
  return e;
}

struct Objective {
  double value = 0.0;
  double l1 = 0.0;  // mean per-object L1
};

}  // namespace

CameraCalibration SceneCamera::calibration() {
  return CameraCalibration::FromIntrinsics(kFocal, kTheta, kPhi);
}

FeatureBatch SyntheticScene::batch() const {
  const Eigen::Index m = size();
  FeatureBatch b;
  b.x.resize(m > 0 ? objects.front().features.size() : 0, m);
  b.u2d.resize(m);
  b.z3d.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& o = objects[static_cast<std::size_t>(i)];
    b.x.col(i) = o.features;
    b.u2d(i) = o.u2d_norm;
    b.z3d(i) = o.z3d;
  }
  return b;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> SyntheticScene::targets() const {
  Eigen::Matrix<double, 2, Eigen::Dynamic> y(2, size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    y(0, i) = objects[static_cast<std::size_t>(i)].u3d;
    y(1, i) = objects[static_cast<std::size_t>(i)].z3d;
  }
  return y;
}

SyntheticScene generate_scene(std::size_t n_objects, std::size_t feature_dim,
                              double noise_sigma, std::uint64_t seed) {
  if (n_objects < 1) throw DomainError("scene needs at least one object");
  if (feature_dim < 2) throw DomainError("feature dimension must be at least 2");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");

  const Eigen::MatrixXd embed = Embedding(feature_dim);
  const CameraCalibration calib = SceneCamera::calibration();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lateral(-15.0, 15.0);
  std::uniform_real_distribution<double> depth(5.0, 80.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticScene scene;
  scene.seed = seed;
  scene.noise_sigma = noise_sigma;
  scene.objects.reserve(n_objects);
  for (std::size_t i = 0; i < n_objects; ++i) {
    SceneObject o;
    o.u3d = lateral(rng);
    o.z3d = depth(rng);
    const PixelPoint px =
        forward_project({o.u3d, SceneCamera::kCameraHeight, o.z3d}, calib);
    o.u2d_norm = px.u / SceneCamera::kImageWidth;
    o.features = embed * Eigen::Vector2d(o.u3d / 2.0, o.z3d / 8.0);
    for (Eigen::Index k = 0; k < o.features.size(); ++k) {
      const double n = normal(rng);
      o.features(k) += noise_sigma * n;
    }
    scene.objects.push_back(std::move(o));
  }
  return scene;
}

double mean_l1(const LinearHead& head, const SyntheticScene& scene) {
  const auto residual = head.predict(scene.batch().x) - scene.targets();
  return residual.cwiseAbs().sum() / static_cast<double>(scene.size());
}

TrainResult train(const SyntheticScene& scene, const LossConfig& loss,
                  const TrainConfig& cfg) {
  loss.validate();
  if (!(cfg.lr > 0.0)) throw DomainError("learning rate must be positive");
  if (cfg.epochs < 1) throw DomainError("epochs must be >= 1");
  if (scene.size() < 1) throw DomainError("scene is empty");

  const FeatureBatch batch = scene.batch();
  const auto targets = scene.targets();
  const Eigen::Index m = batch.size();
  const Eigen::Index n = batch.feature_dim();
  const double inv_m = 1.0 / static_cast<double>(m);
  const double pair_norm = inv_m * inv_m;
  const bool regularize = cfg.use_regularizer && loss.beta > 0.0;

  // R(W) = beta tr(W A W^T) with A = X P X^T, fixed for the whole run.
  Eigen::MatrixXd a;
  if (regularize) {
    const SimilarityGraph graph = build_graph(batch, loss.lambda);
    a = batch.x * graph.p * batch.x.transpose();
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, kInitScale);
  LinearHead head = LinearHead::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < 2; ++r) head.w(r, c) = normal(rng);
  }

  auto evaluate = [&](const LinearHead& h, Eigen::Matrix<double, 2, Eigen::Dynamic>& residual) {
    residual = h.predict(batch.x) - targets;
    Objective o;
    const double l1_sum = residual.cwiseAbs().sum();
    o.l1 = l1_sum * inv_m;
    double value = l1_sum;
    if (regularize) value += loss.beta * (h.w * a * h.w.transpose()).trace() * pair_norm;
    o.value = value * inv_m;
    return o;
  };

  TrainReport report;
  report.loss = loss;
  report.train = cfg;
  report.n_objects = static_cast<std::size_t>(m);
  report.feature_dim = static_cast<std::size_t>(n);
  report.noise_sigma = scene.noise_sigma;
  report.scene_seed = scene.seed;
  report.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs));

  Eigen::Matrix<double, 2, Eigen::Dynamic> vel_w = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n);
  Eigen::Vector2d vel_b = Eigen::Vector2d::Zero();
  Eigen::Matrix<double, 2, Eigen::Dynamic> residual;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Objective obj = evaluate(head, residual);
    if (!std::isfinite(obj.value) || obj.value > kDivergenceLimit) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                "; last finite epoch " + std::to_string(epoch - 1),
                            epoch - 1);
    }
    report.loss_curve.push_back(obj.value);
    if (!report.epochs_to_tolerance && obj.l1 < cfg.tolerance) {
      report.epochs_to_tolerance = epoch;
    }

    const Eigen::Matrix<double, 2, Eigen::Dynamic> sign =
        residual.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
    Eigen::Matrix<double, 2, Eigen::Dynamic> grad_w = sign * batch.x.transpose();
    if (regularize) grad_w += (2.0 * loss.beta * pair_norm) * (head.w * a);
    grad_w *= inv_m;
    const Eigen::Vector2d grad_b = sign.rowwise().sum() * inv_m;

    const double step = cfg.lr * (1.0 - static_cast<double>(epoch) / cfg.epochs);
    vel_w = cfg.momentum * vel_w - step * grad_w;
    vel_b = cfg.momentum * vel_b - step * grad_b;
    head.w += vel_w;
    head.b += vel_b;
  }

  const Objective final_obj = evaluate(head, residual);
  if (!std::isfinite(final_obj.value) || final_obj.value > kDivergenceLimit) {
    throw DivergenceError("training diverged after the last epoch", cfg.epochs - 1);
  }
  if (!report.epochs_to_tolerance && final_obj.l1 < cfg.tolerance) {
    report.epochs_to_tolerance = cfg.epochs;
  }
  report.final_l1 = final_obj.l1;
  report.neighbor_order_violations = neighbor_order_violations(head, scene, loss.lambda);
  return {std::move(head), std::move(report)};
}

std::size_t neighbor_order_violations(const LinearHead& head, const SyntheticScene& scene,
                                      double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const auto pred = head.predict(scene.batch().x);
  const double max_dz = 0.5 * std::sqrt(lambda);
  std::size_t count = 0;
  const Eigen::Index m = scene.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& oi = scene.objects[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const auto& oj = scene.objects[static_cast<std::size_t>(j)];
      if (!(std::abs(oi.z3d - oj.z3d) < max_dz)) continue;
      const double truth = oi.u3d - oj.u3d;
      const double guess = pred(0, i) - pred(0, j);
      if (truth * guess < 0.0) ++count;
    }
  }
  return count;
}

nlohmann::ordered_json to_json(const TrainReport& r) {
  nlohmann::ordered_json j;
  j["epochs_to_tolerance"] = nullptr;
  if (r.epochs_to_tolerance) j["epochs_to_tolerance"] = *r.epochs_to_tolerance;
  j["final_l1"] = fixed6(r.final_l1);
  j["neighbor_order_violations"] = r.neighbor_order_violations;
  auto& curve = j["loss_curve"] = nlohmann::ordered_json::array();
  for (double v : r.loss_curve) curve.push_back(fixed6(v));
  auto& c = j["config"];
  c["use_regularizer"] = r.train.use_regularizer;
  c["alpha"] = fixed6(r.loss.alpha);
  c["beta"] = fixed6(r.loss.beta);
  c["gamma"] = fixed6(r.loss.gamma);
  c["lambda"] = fixed6(r.loss.lambda);
  c["lr"] = r.train.lr;
  c["epochs"] = r.train.epochs;
  c["momentum"] = fixed6(r.train.momentum);
  c["tolerance"] = fixed6(r.train.tolerance);
  c["seed"] = r.train.seed;
  c["scene_seed"] = r.scene_seed;
  c["n_objects"] = r.n_objects;
  c["feature_dim"] = r.feature_dim;
  c["noise_sigma"] = fixed6(r.noise_sigma);
  return j;
}

namespace {

ArmSummary Summarise(std::vector<TrainReport> reports, int epoch_budget) {
  ArmSummary arm;
  arm.reports = std::move(reports);
  if (arm.reports.empty()) return arm;
  for (const auto& r : arm.reports) {
    arm.mean_violations += static_cast<double>(r.neighbor_order_violations);
    arm.mean_final_l1 += r.final_l1;
    if (r.epochs_to_tolerance) {
      arm.mean_epochs_to_tolerance += *r.epochs_to_tolerance;
    } else {
      arm.mean_epochs_to_tolerance += epoch_budget;
      ++arm.not_reached;
    }
  }
  const double n = static_cast<double>(arm.reports.size());
  arm.mean_violations /= n;
  arm.mean_final_l1 /= n;
  arm.mean_epochs_to_tolerance /= n;
  return arm;
}

}  // namespace

PairedExperiment run_paired_experiment(const PairedConfig& cfg) {
  std::vector<TrainReport> reg;
  std::vector<TrainReport> plain;
  for (std::uint64_t seed : cfg.seeds) {
    const SyntheticScene scene =
        generate_scene(cfg.n_objects, cfg.feature_dim, cfg.noise_sigma, seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    auto run = [&](bool regularized) {
      tc.use_regularizer = regularized;
      try {
        return train(scene, cfg.loss, tc).report;
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(regularized ? "regularized" : "unregularized") +
                                  " arm, seed " + std::to_string(seed) + ": " + e.what(),
                              e.last_finite_epoch());
      }
    };
    if (cfg.run_regularized) reg.push_back(run(true));
    plain.push_back(run(false));
  }
  PairedExperiment out;
  if (cfg.run_regularized) out.regularized = Summarise(std::move(reg), cfg.train.epochs);
  out.unregularized = Summarise(std::move(plain), cfg.train.epochs);
  return out;
}

nlohmann::ordered_json to_json(const ArmSummary& arm, bool include_reports) {
  nlohmann::ordered_json j;
  j["runs"] = arm.reports.size();
  j["mean_neighbor_order_violations"] = fixed6(arm.mean_violations);
  j["mean_epochs_to_tolerance"] = fixed6(arm.mean_epochs_to_tolerance);
  j["runs_not_reaching_tolerance"] = arm.not_reached;
  j["mean_final_l1"] = fixed6(arm.mean_final_l1);
  if (include_reports) {
    auto& reports = j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : arm.reports) reports.push_back(to_json(r));
  }
  return j;
}

}  // namespace monoloc
