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

#include "monoloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "monoloc/error.hpp"

namespace monoloc {

namespace {

constexpr double kDegenerateArea = 1e-12;

struct Footprint {
  BevPolygon poly;
  double area = 0.0;
};

Footprint MakeFootprint(const Box3D& box) {
  Footprint f{bev_footprint(box), 0.0};
  f.area = signed_area(f.poly.vertices);
  return f;
}

// Clipped overlap of two counter-clockwise footprints.
double IntersectionArea(const Footprint& a, const Footprint& b) {
  const auto inter = convex_intersection(a.poly.vertices, b.poly.vertices);
  return std::max(0.0, signed_area(inter));
}

bool CheckDegenerate(const Footprint& a, const Footprint& b) {
  const bool da = !(a.area > kDegenerateArea);
  const bool db = !(b.area > kDegenerateArea);
  if (da && db) throw DomainError("both boxes have a degenerate footprint");
  return da || db;
}

bool Inside(const Box3D& box, double x, double y, double z) {
  if (y < box.top() || y > box.bottom()) return false;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double dx = x - box.center.x;
  const double dz = z - box.center.z;
  const double lx = c * dx - s * dz;
  const double lz = s * dx + c * dz;
  return std::abs(lx) <= 0.5 * box.dims.length && std::abs(lz) <= 0.5 * box.dims.width;
}

}  // namespace

std::string_view to_string(IouMetric m) {
  return m == IouMetric::k3D ? "3d" : "bev";
}

double bev_iou(const Box3D& a, const Box3D& b) {
  const Footprint fa = MakeFootprint(a);
  const Footprint fb = MakeFootprint(b);
  if (CheckDegenerate(fa, fb)) return 0.0;
  const double inter = IntersectionArea(fa, fb);
  const double uni = fa.area + fb.area - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const Footprint fa = MakeFootprint(a);
  const Footprint fb = MakeFootprint(b);
  if (CheckDegenerate(fa, fb)) return 0.0;
  const double overlap_h =
      std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top()));
  if (overlap_h <= 0.0) return 0.0;
  const double inter = IntersectionArea(fa, fb) * overlap_h;
  const double vol_a = fa.area * a.dims.height;
  const double vol_b = fb.area * b.dims.height;
  const double uni = vol_a + vol_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double monte_carlo_iou_3d(const Box3D& a, const Box3D& b, std::size_t samples,
                          std::uint64_t seed) {
  double lo[3] = {std::numeric_limits<double>::infinity(), 0, 0};
  double hi[3] = {-std::numeric_limits<double>::infinity(), 0, 0};
  lo[1] = lo[2] = lo[0];
  hi[1] = hi[2] = hi[0];
  for (const Box3D* box : {&a, &b}) {
    for (const Vec3& p : box3d_corners(*box).corners) {
      const double v[3] = {p.x, p.y, p.z};
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo[0], hi[0]);
  std::uniform_real_distribution<double> uy(lo[1], hi[1]);
  std::uniform_real_distribution<double> uz(lo[2], hi[2]);
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double z = uz(rng);
    const bool in_a = Inside(a, x, y, z);
    const bool in_b = Inside(b, x, y, z);
    both += (in_a && in_b);
    either += (in_a || in_b);
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

MatchResult match_frame(const std::vector<ObjectAnnotation>& predictions,
                        const std::vector<ObjectAnnotation>& ground_truths,
                        const MatchOptions& options, std::string frame_id) {
  MatchResult result;
  result.frame_id = std::move(frame_id);
  result.scores.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i].score) {
      throw ValidationError("prediction " + std::to_string(i) + " has no score");
    }
    result.scores.push_back(*predictions[i].score);
  }

  std::vector<std::size_t> valid_gt;
  std::vector<std::size_t> ignored_gt;
  for (std::size_t j = 0; j < ground_truths.size(); ++j) {
    const auto& gt = ground_truths[j];
    if (gt.class_name != options.class_name) continue;
    const Difficulty d = assign_difficulty(gt);
    if (d != Difficulty::kIgnored && d <= options.difficulty) {
      valid_gt.push_back(j);
    } else {
      ignored_gt.push_back(j);
    }
  }
  result.valid_ground_truths = valid_gt.size();

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].class_name == options.class_name) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return result.scores[l] > result.scores[r];
  });

  auto overlap = [&](const ObjectAnnotation& p, const ObjectAnnotation& g) {
    const Box3D bp = Box3D::FromAnnotation(p);
    const Box3D bg = Box3D::FromAnnotation(g);
    return options.metric == IouMetric::k3D ? iou_3d(bp, bg) : bev_iou(bp, bg);
  };

  std::vector<bool> taken(ground_truths.size(), false);
  for (std::size_t i : order) {
    double best_iou = -1.0;
    std::size_t best = 0;
    for (std::size_t j : valid_gt) {
      if (taken[j]) continue;
      const double iou = overlap(predictions[i], ground_truths[j]);
      if (iou >= options.iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = j;
      }
    }
    if (best_iou >= 0.0) {
      taken[best] = true;
      result.pairs.push_back({i, best, best_iou});
      continue;
    }
    const bool hits_ignored = std::any_of(ignored_gt.begin(), ignored_gt.end(), [&](std::size_t j) {
      return overlap(predictions[i], ground_truths[j]) >= options.iou_threshold;
    });
    (hits_ignored ? result.ignored_predictions : result.unmatched_predictions).push_back(i);
  }
  for (std::size_t j : valid_gt) {
    if (!taken[j]) result.unmatched_ground_truths.push_back(j);
  }
  return result;
}

PrecisionRecallCurve average_precision(std::span<const MatchResult> matches,
                                       std::size_t n_gt, ApMode mode) {
  if (n_gt == 0) throw DomainError("average precision is undefined without ground truth");

  struct Detection {
    double score;
    bool tp;
  };
  std::vector<Detection> dets;
  for (const auto& m : matches) {
    for (const auto& p : m.pairs) dets.push_back({m.scores.at(p.prediction), true});
    for (std::size_t i : m.unmatched_predictions) dets.push_back({m.scores.at(i), false});
  }
  std::sort(dets.begin(), dets.end(),
            [](const Detection& a, const Detection& b) { return a.score > b.score; });

  // (tp, fp) at each distinct threshold, highest threshold first.
  struct Count {
    std::size_t tp;
    std::size_t fp;
  };
  std::vector<Count> counts;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    (dets[i].tp ? tp : fp) += 1;
    if (i + 1 == dets.size() || dets[i + 1].score < dets[i].score) counts.push_back({tp, fp});
  }

  PrecisionRecallCurve curve;
  const double n = static_cast<double>(n_gt);
  curve.points.push_back({0.0, 1.0});
  for (const auto& c : counts) {
    curve.points.push_back({static_cast<double>(c.tp) / n,
                            static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)});
  }
  if (tp == 0) {
    curve.ap = 0.0;
    return curve;
  }

  const std::size_t levels = mode == ApMode::k11Point ? 10 : 40;
  const std::size_t first = mode == ApMode::k11Point ? 0 : 1;
  // Recall comparisons in integers: tp / n_gt >= k / levels.
  auto best_precision = [&](std::size_t k) {
    double best = 0.0;
    if (k == 0) best = 1.0;  // the anchor point
    for (const auto& c : counts) {
      if (c.tp * levels >= k * n_gt) {
        best = std::max(best, static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp));
      }
    }
    return best;
  };
  double sum = 0.0;
  for (std::size_t k = first; k <= levels; ++k) sum += best_precision(k);
  curve.ap = sum / static_cast<double>(levels - first + 1);
  return curve;
}

LocalizationReport localization_report(std::span<const CenterPair> pairs) {
  if (pairs.empty()) throw DomainError("localisation report needs at least one pair");
  constexpr std::size_t kBins = std::size(kDepthBinEdges) - 1;

  struct Accum {
    std::size_t count = 0;
    double eu = 0.0, ev = 0.0, ez = 0.0;
  };
  Accum total;
  std::array<Accum, kBins> bins{};
  for (const auto& p : pairs) {
    const double z = p.ground_truth.z;
    if (!(z > 0.0)) throw DomainError("ground-truth depth must be positive");
    const double eu = std::abs(p.prediction.x - p.ground_truth.x) / z;
    const double ev = std::abs(p.prediction.y - p.ground_truth.y) / z;
    const double ez = std::abs(p.prediction.z - p.ground_truth.z) / z;
    auto add = [&](Accum& a) {
      ++a.count;
      a.eu += eu;
      a.ev += ev;
      a.ez += ez;
    };
    add(total);
    for (std::size_t b = 0; b < kBins; ++b) {
      const bool last = b + 1 == kBins;
      if (z >= kDepthBinEdges[b] && (z < kDepthBinEdges[b + 1] || (last && z <= kDepthBinEdges[b + 1]))) {
        add(bins[b]);
        break;
      }
    }
  }

  auto ra = [](double err_sum, std::size_t count) {
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::clamp(1.0 - err_sum / static_cast<double>(count), 0.0, 1.0);
  };
  LocalizationReport report;
  report.count = total.count;
  report.ra_u = ra(total.eu, total.count);
  report.ra_v = ra(total.ev, total.count);
  report.ra_z = ra(total.ez, total.count);
  for (std::size_t b = 0; b < kBins; ++b) {
    report.depth_bins.push_back({kDepthBinEdges[b], kDepthBinEdges[b + 1], bins[b].count,
                                 ra(bins[b].eu, bins[b].count), ra(bins[b].ev, bins[b].count),
                                 ra(bins[b].ez, bins[b].count)});
  }
  return report;
}

}  // namespace monoloc
