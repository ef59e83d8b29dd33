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

#include "monoloc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "monoloc/error.hpp"

namespace monoloc {

namespace {

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::array<double, 4> BoxVector(const Box2D& b) {
  return {b.center_u, b.center_v, b.width, b.height};
}

Vec3 Add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

void CheckShapes(const PredictionBatch& pred, const GridTarget& target) {
  if (pred.rows != target.rows || pred.cols != target.cols ||
      pred.cells.size() != target.rows * target.cols ||
      target.cells.size() != target.rows * target.cols) {
    throw DimensionError("prediction and target grids differ in shape");
  }
}

// Log-softmax of two logits.
std::array<double, 2> LogSoftmax(const std::array<double, 2>& s) {
  const double hi = std::max(s[0], s[1]);
  const double lse = hi + std::log(std::exp(s[0] - hi) + std::exp(s[1] - hi));
  return {s[0] - lse, s[1] - lse};
}

double L1Vec3(const Vec3& a, const Vec3& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

Vec3 SignVec3(const Vec3& a, const Vec3& b) {
  return {Sign(a.x - b.x), Sign(a.y - b.y), Sign(a.z - b.z)};
}

}  // namespace

void LossConfig::validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("loss weights must be finite and >= 0");
  }
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
}

GridTarget GridTarget::Empty(std::size_t rows, std::size_t cols) {
  GridTarget t;
  t.rows = rows;
  t.cols = cols;
  t.cells.assign(rows * cols, CellTarget{});
  return t;
}

std::size_t GridTarget::object_count() const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const CellTarget& c) { return c.has_object; }));
}

PredictionBatch PredictionBatch::Zero(std::size_t rows, std::size_t cols) {
  PredictionBatch p;
  p.rows = rows;
  p.cols = cols;
  p.cells.assign(rows * cols, CellPrediction{});
  return p;
}

GridAssignment build_grid_target(const std::vector<ObjectAnnotation>& objects,
                                 double image_width, double image_height,
                                 std::size_t rows, std::size_t cols) {
  if (!(image_width > 0.0 && image_height > 0.0) || rows == 0 || cols == 0) {
    throw DomainError("grid and image sizes must be positive");
  }
  GridAssignment out;
  out.target = GridTarget::Empty(rows, cols);
  const double cell_w = image_width / static_cast<double>(cols);
  const double cell_h = image_height / static_cast<double>(rows);
  auto cell_index = [](double pos, double size, std::size_t count) {
    const double k = std::ceil(pos / size) - 1.0;
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(count - 1)));
  };
  for (const auto& a : objects) {
    if (a.is_dont_care()) continue;
    const Box2D box = Box2D::FromCorners(a.box2d);
    const std::size_t r = cell_index(box.center_v, cell_h, rows);
    const std::size_t c = cell_index(box.center_u, cell_w, cols);
    const std::size_t idx = r * cols + c;
    CellTarget& cell = out.target.cells[idx];
    if (cell.has_object) {
      ++out.dropped;
      continue;
    }
    cell.has_object = true;
    cell.box2d = box;
    cell.pr_obj = 1.0;
    cell.z = a.location.z;
    cell.c3d = a.location;
    cell.corners = box3d_corners(Box3D::FromAnnotation(a));
    out.cell_of_object.push_back(idx);
  }
  return out;
}

double l1(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw DimensionError("l1: length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) sum += std::abs(pred[k] - target[k]);
  return sum;
}

double confidence_loss(std::span<const std::array<double, 2>> scores,
                       std::span<const double> targets) {
  if (scores.size() != targets.size()) throw DimensionError("confidence: length mismatch");
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t g = 0; g < scores.size(); ++g) {
    const double t = targets[g];
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("confidence target outside [0, 1]");
    if (!std::isfinite(scores[g][0]) || !std::isfinite(scores[g][1])) {
      throw DomainError("confidence scores must be finite");
    }
    const auto logq = LogSoftmax(scores[g]);
    double ce = 0.0;
    if (t > 0.0) ce -= t * logq[0];
    if (t < 1.0) ce -= (1.0 - t) * logq[1];
    sum += ce;
  }
  return sum / static_cast<double>(scores.size());
}

namespace {

double ConfidenceTerm(const PredictionBatch& pred, const GridTarget& target) {
  std::vector<std::array<double, 2>> scores;
  std::vector<double> probs;
  scores.reserve(pred.cells.size());
  probs.reserve(pred.cells.size());
  for (std::size_t g = 0; g < pred.cells.size(); ++g) {
    scores.push_back(pred.cells[g].scores);
    probs.push_back(target.cells[g].has_object ? target.cells[g].pr_obj : 0.0);
  }
  return confidence_loss(scores, probs);
}

}  // namespace

double loss_2d(const PredictionBatch& pred, const GridTarget& target,
               const LossConfig& cfg) {
  CheckShapes(pred, target);
  cfg.validate();
  double box_term = 0.0;
  for (std::size_t g = 0; g < target.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    const auto p = BoxVector(pred.cells[g].box2d);
    const auto t = BoxVector(target.cells[g].box2d);
    box_term += l1(p, t);
  }
  return ConfidenceTerm(pred, target) + cfg.alpha * box_term;
}

double loss_depth(const PredictionBatch& pred, const GridTarget& target,
                  const LossConfig& cfg) {
  CheckShapes(pred, target);
  cfg.validate();
  double coarse = 0.0;
  double refined = 0.0;
  for (std::size_t g = 0; g < target.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    const auto& p = pred.cells[g];
    const double z = target.cells[g].z;
    coarse += std::abs(p.z_coa - z);
    refined += std::abs(p.z_coa + p.z_delta - z);
  }
  return cfg.gamma * coarse + refined;
}

double loss_center3d(const PredictionBatch& pred, const GridTarget& target,
                     const LinearHead& head, const FeatureBatch& batch,
                     const SimilarityGraph& graph, const LossConfig& cfg) {
  CheckShapes(pred, target);
  cfg.validate();
  const std::size_t objects = target.object_count();
  if (static_cast<std::size_t>(batch.size()) != objects ||
      static_cast<std::size_t>(graph.size()) != objects) {
    throw DimensionError("feature batch / graph must cover exactly the occupied cells");
  }
  double center = 0.0;
  for (std::size_t g = 0; g < target.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    const auto& p = pred.cells[g];
    center += L1Vec3(Add(p.c_coa, p.c_delta), target.cells[g].c3d);
  }
  return center + reg_trace(head, batch, graph, cfg.beta);
}

double loss_corners(const PredictionBatch& pred, const GridTarget& target) {
  CheckShapes(pred, target);
  double sum = 0.0;
  for (std::size_t g = 0; g < target.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    for (std::size_t k = 0; k < 8; ++k) {
      sum += L1Vec3(pred.cells[g].corners.corners[k], target.cells[g].corners.corners[k]);
    }
  }
  return sum;
}

Vec3 coarse_center(const Box2D& box2d, double depth, const CameraCalibration& calib) {
  const MetricOffset m = inverse_project({box2d.center_u, box2d.center_v}, depth, calib);
  return {m.u, m.v, depth};
}

PredictionBatch loss_2d_gradient(const PredictionBatch& pred, const GridTarget& target,
                                 const LossConfig& cfg) {
  CheckShapes(pred, target);
  cfg.validate();
  PredictionBatch grad = PredictionBatch::Zero(pred.rows, pred.cols);
  const double inv_n = 1.0 / static_cast<double>(pred.cells.size());
  for (std::size_t g = 0; g < pred.cells.size(); ++g) {
    const auto& tc = target.cells[g];
    const double t = tc.has_object ? tc.pr_obj : 0.0;
    const auto logq = LogSoftmax(pred.cells[g].scores);
    grad.cells[g].scores = {(std::exp(logq[0]) - t) * inv_n,
                            (std::exp(logq[1]) - (1.0 - t)) * inv_n};
    if (!tc.has_object) continue;
    const Box2D& p = pred.cells[g].box2d;
    Box2D& d = grad.cells[g].box2d;
    d.center_u = cfg.alpha * Sign(p.center_u - tc.box2d.center_u);
    d.center_v = cfg.alpha * Sign(p.center_v - tc.box2d.center_v);
    d.width = cfg.alpha * Sign(p.width - tc.box2d.width);
    d.height = cfg.alpha * Sign(p.height - tc.box2d.height);
  }
  return grad;
}

PredictionBatch loss_depth_gradient(const PredictionBatch& pred,
                                    const GridTarget& target, const LossConfig& cfg) {
  CheckShapes(pred, target);
  cfg.validate();
  PredictionBatch grad = PredictionBatch::Zero(pred.rows, pred.cols);
  for (std::size_t g = 0; g < pred.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    const auto& p = pred.cells[g];
    const double z = target.cells[g].z;
    const double refined = Sign(p.z_coa + p.z_delta - z);
    grad.cells[g].z_coa = cfg.gamma * Sign(p.z_coa - z) + refined;
    grad.cells[g].z_delta = refined;
  }
  return grad;
}

PredictionBatch loss_center3d_gradient(const PredictionBatch& pred,
                                       const GridTarget& target) {
  CheckShapes(pred, target);
  PredictionBatch grad = PredictionBatch::Zero(pred.rows, pred.cols);
  for (std::size_t g = 0; g < pred.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    const auto& p = pred.cells[g];
    const Vec3 s = SignVec3(Add(p.c_coa, p.c_delta), target.cells[g].c3d);
    grad.cells[g].c_coa = s;
    grad.cells[g].c_delta = s;
  }
  return grad;
}

PredictionBatch loss_corners_gradient(const PredictionBatch& pred,
                                      const GridTarget& target) {
  CheckShapes(pred, target);
  PredictionBatch grad = PredictionBatch::Zero(pred.rows, pred.cols);
  for (std::size_t g = 0; g < pred.cells.size(); ++g) {
    if (!target.cells[g].has_object) continue;
    for (std::size_t k = 0; k < 8; ++k) {
      grad.cells[g].corners.corners[k] =
          SignVec3(pred.cells[g].corners.corners[k], target.cells[g].corners.corners[k]);
    }
  }
  return grad;
}

}  // namespace monoloc
