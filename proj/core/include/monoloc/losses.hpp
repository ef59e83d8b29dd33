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

// Per-cell training losses over a detection grid: 2D box + confidence,
// coarse/residual instance depth, 3D centre (with the locality regulariser)
// and 3D corners. All L1 terms are masked by the cell's object indicator.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "monoloc/geometry.hpp"
#include "monoloc/kitti_io.hpp"
#include "monoloc/locality_reg.hpp"

namespace monoloc {

inline constexpr std::size_t kGridSize = 32;

struct LossConfig {
  double alpha = 10.0;   // 2D box weight
  double beta = kDefaultBeta;
  double gamma = 10.0;   // coarse depth weight
  double lambda = kDefaultLambda;

  // Weights must be finite and >= 0 (zero disables a term), lambda > 0.
  void validate() const;
};

struct CellTarget {
  bool has_object = false;
  Box2D box2d;
  double pr_obj = 0.0;
  double z = 0.0;
  Vec3 c3d;
  CornerSet corners;
};

// Row-major grid of targets; cell (r, c) is cells[r * cols + c].
struct GridTarget {
  std::size_t rows = kGridSize;
  std::size_t cols = kGridSize;
  std::vector<CellTarget> cells;

  static GridTarget Empty(std::size_t rows = kGridSize, std::size_t cols = kGridSize);
  std::size_t object_count() const;
};

// Index 0 of `scores` is the object logit, index 1 the background logit.
struct CellPrediction {
  std::array<double, 2> scores{0.0, 0.0};
  Box2D box2d;
  double z_coa = 0.0;
  double z_delta = 0.0;
  Vec3 c_coa;
  Vec3 c_delta;
  CornerSet corners;
};

// Same layout as GridTarget. Also used to hold gradients with respect to
// every predicted quantity.
struct PredictionBatch {
  std::size_t rows = kGridSize;
  std::size_t cols = kGridSize;
  std::vector<CellPrediction> cells;

  static PredictionBatch Zero(std::size_t rows = kGridSize, std::size_t cols = kGridSize);
};

struct GridAssignment {
  GridTarget target;
  std::vector<std::size_t> cell_of_object;  // one entry per assigned object
  std::size_t dropped = 0;                  // objects sharing an occupied cell
};

/// Places every non-DontCare annotation in the cell that contains its 2D box
/// centre. A centre on a cell boundary goes to the lower-index cell. When two
/// objects land in one cell, the first in input order is kept.
GridAssignment build_grid_target(const std::vector<ObjectAnnotation>& objects,
                                 double image_width, double image_height,
                                 std::size_t rows = kGridSize,
                                 std::size_t cols = kGridSize);

double l1(std::span<const double> pred, std::span<const double> target);

/// Mean over cells of the cross-entropy between softmax(scores) and the
/// two-class target (pr_obj, 1 - pr_obj).
double confidence_loss(std::span<const std::array<double, 2>> scores,
                       std::span<const double> targets);

double loss_2d(const PredictionBatch& pred, const GridTarget& target,
               const LossConfig& cfg);

double loss_depth(const PredictionBatch& pred, const GridTarget& target,
                  const LossConfig& cfg);

/// Centre L1 on c_coa + c_delta plus reg_trace(head, batch, graph, beta).
/// The batch columns correspond to the occupied cells in row-major order.
double loss_center3d(const PredictionBatch& pred, const GridTarget& target,
                     const LinearHead& head, const FeatureBatch& batch,
                     const SimilarityGraph& graph, const LossConfig& cfg);

// Corners are matched by index, not as a set.
double loss_corners(const PredictionBatch& pred, const GridTarget& target);

// (inverse_project(centre, depth), depth).
Vec3 coarse_center(const Box2D& box2d, double depth, const CameraCalibration& calib);

// Analytic (sub)gradients with respect to the predictions. L1 uses sign(0) = 0.
PredictionBatch loss_2d_gradient(const PredictionBatch& pred, const GridTarget& target,
                                 const LossConfig& cfg);
PredictionBatch loss_depth_gradient(const PredictionBatch& pred,
                                    const GridTarget& target, const LossConfig& cfg);
PredictionBatch loss_center3d_gradient(const PredictionBatch& pred,
                                       const GridTarget& target);
PredictionBatch loss_corners_gradient(const PredictionBatch& pred,
                                      const GridTarget& target);

}  // namespace monoloc
