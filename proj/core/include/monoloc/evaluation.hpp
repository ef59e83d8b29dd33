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

// KITTI-style detection and localisation metrics.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "monoloc/geometry.hpp"
#include "monoloc/kitti_io.hpp"

namespace monoloc {

enum class IouMetric { k3D, kBev };
enum class ApMode { k11Point, k40Point };

std::string_view to_string(IouMetric m);

/// Area of footprint intersection over area of union. A zero-area footprint
/// overlaps nothing; two zero-area footprints raise DomainError.
double bev_iou(const Box3D& a, const Box3D& b);

/// BEV intersection times vertical overlap, over the volume union.
double iou_3d(const Box3D& a, const Box3D& b);

/// Point-sampling estimate of iou_3d: uniform samples in the joint bounding
/// box, counted by membership in either box. Deterministic for a seed.
double monte_carlo_iou_3d(const Box3D& a, const Box3D& b, std::size_t samples,
                          std::uint64_t seed);

struct MatchOptions {
  double iou_threshold = 0.7;
  IouMetric metric = IouMetric::k3D;
  // Ground truths harder than this tier are ignored: they are never matched
  // and never counted as misses.
  Difficulty difficulty = Difficulty::kHard;
  std::string class_name = "Car";
};

struct MatchPair {
  std::size_t prediction = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
};

// Indices refer to the prediction / ground-truth lists given to match_frame.
// Predictions of other classes appear in no list. Predictions that only
// overlap ignored ground truths are listed in `ignored_predictions` and are
// neither true nor false positives.
struct MatchResult {
  std::string frame_id;
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_ground_truths;
  std::vector<std::size_t> ignored_predictions;
  std::vector<double> scores;  // score of every prediction, by index
  std::size_t valid_ground_truths = 0;
};

/// Greedy matching in descending score order (ties by input index): each
/// prediction takes the unmatched valid ground truth of highest IoU, provided
/// it reaches the threshold. DontCare rows are skipped. Throws
/// ValidationError if a prediction has no score.
MatchResult match_frame(const std::vector<ObjectAnnotation>& predictions,
                        const std::vector<ObjectAnnotation>& ground_truths,
                        const MatchOptions& options, std::string frame_id = {});

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrecisionRecallCurve {
  std::vector<PrPoint> points;  // recall non-decreasing
  double ap = 0.0;
};

/// Sweeps the score threshold over every distinct detection score. The curve
/// starts at (recall 0, precision 1), the operating point above every score.
/// The interpolated precision at a recall level r is the maximum precision
/// among points with recall >= r; AP averages it over {0, 0.1, ..., 1}
/// (11-point) or {1/40, ..., 1} (40-point). A curve that never reaches a
/// positive recall has AP 0. Throws DomainError if n_gt == 0.
PrecisionRecallCurve average_precision(std::span<const MatchResult> matches,
                                       std::size_t n_gt,
                                       ApMode mode = ApMode::k11Point);

struct CenterPair {
  Vec3 ground_truth;
  Vec3 prediction;
};

struct DepthBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double ra_u = 0.0;  // NaN when count == 0
  double ra_v = 0.0;
  double ra_z = 0.0;
};

struct LocalizationReport {
  double ra_u = 0.0;
  double ra_v = 0.0;
  double ra_z = 0.0;
  std::size_t count = 0;
  std::vector<DepthBin> depth_bins;
};

// Bin edges in metres; the final bin merges 70-80 and 80-90 and is closed.
inline constexpr double kDepthBinEdges[] = {0, 10, 20, 30, 40, 50, 60, 70, 90};

/// Relative accuracy per coordinate, ra_c = 1 - mean(|c_pred - c_gt| / z_gt),
/// clamped to [0, 1], overall and per depth bin (binned by ground-truth z).
/// Throws DomainError on empty input or non-positive ground-truth depth.
LocalizationReport localization_report(std::span<const CenterPair> pairs);

}  // namespace monoloc
