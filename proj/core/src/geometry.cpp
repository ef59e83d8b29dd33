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

#include "monoloc/geometry.hpp"

#include <cmath>
#include <string>

#include "monoloc/error.hpp"

namespace monoloc {

namespace {

constexpr double kMergeEps = 1e-9;

double Cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

Point2 LineIntersection(const Point2& p, const Point2& q, const Point2& a,
                        const Point2& b) {
  // Point on segment pq where it crosses the infinite line ab.
  const double dp = Cross(a, b, p);
  const double dq = Cross(a, b, q);
  const double t = dp / (dp - dq);
  return {p.x + t * (q.x - p.x), p.z + t * (q.z - p.z)};
}

bool Near(const Point2& a, const Point2& b) {
  return std::abs(a.x - b.x) <= kMergeEps && std::abs(a.z - b.z) <= kMergeEps;
}

void PushMerged(std::vector<Point2>& out, const Point2& p) {
  if (out.empty() || !Near(out.back(), p)) out.push_back(p);
}

}  // namespace

Box2D Box2D::FromCorners(const PixelBox& b) {
  return Box2D{0.5 * (b.left + b.right), 0.5 * (b.top + b.bottom), b.width(),
               b.height(), std::nullopt};
}

Box3D Box3D::FromAnnotation(const ObjectAnnotation& a) {
  return Box3D{a.location, a.dims, a.rotation_y};
}

void validate_box(const Box3D& box) {
  if (!(box.dims.height > 0.0 && box.dims.width > 0.0 && box.dims.length > 0.0)) {
    throw DomainError("box dimensions must be positive");
  }
  if (!std::isfinite(box.center.x) || !std::isfinite(box.center.y) ||
      !std::isfinite(box.center.z) || !std::isfinite(box.yaw)) {
    throw DomainError("box center and yaw must be finite");
  }
}

MetricOffset inverse_project(PixelPoint center, double depth,
                             const CameraCalibration& calib) {
  if (!(depth > 0.0)) throw DomainError("depth must be positive");
  const double f = calib.focal();
  if (!(f > 0.0)) throw DomainError("focal length must be positive");
  return {(center.u - calib.theta()) * depth / f,
          (center.v - calib.phi()) * depth / f};
}

PixelPoint forward_project(const Vec3& point, const CameraCalibration& calib) {
  if (!(point.z > 0.0)) throw DomainError("point must lie in front of the camera");
  const double f = calib.focal();
  return {f * point.x / point.z + calib.theta(), f * point.y / point.z + calib.phi()};
}

CornerSet box3d_corners(const Box3D& box) {
  const double hl = 0.5 * box.dims.length;
  const double hw = 0.5 * box.dims.width;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  // Footprint in the object frame: length along x, width along z.
  const std::array<Point2, 4> local = {{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  CornerSet out;
  for (std::size_t k = 0; k < 4; ++k) {
    const double x = box.center.x + c * local[k].x + s * local[k].z;
    const double z = box.center.z - s * local[k].x + c * local[k].z;
    out.corners[k] = {x, box.center.y, z};
    out.corners[k + 4] = {x, box.center.y - box.dims.height, z};
  }
  return out;
}

BevPolygon bev_footprint(const Box3D& box) {
  const CornerSet cs = box3d_corners(box);
  BevPolygon poly;
  for (std::size_t k = 0; k < 4; ++k) poly.vertices[k] = {cs.corners[k].x, cs.corners[k].z};
  return poly;
}

double signed_area(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % n];
    twice += a.x * b.z - b.x * a.z;
  }
  return 0.5 * twice;
}

std::vector<Point2> convex_intersection(std::span<const Point2> subject,
                                        std::span<const Point2> clip) {
  std::vector<Point2> output(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2& a = clip[e];
    const Point2& b = clip[(e + 1) % m];
    std::vector<Point2> input;
    input.swap(output);
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& cur = input[i];
      const Point2& prev = input[(i + n - 1) % n];
      const bool cur_in = Cross(a, b, cur) >= 0.0;
      const bool prev_in = Cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) PushMerged(output, LineIntersection(prev, cur, a, b));
        PushMerged(output, cur);
      } else if (prev_in) {
        PushMerged(output, LineIntersection(prev, cur, a, b));
      }
    }
    if (output.size() > 1 && Near(output.front(), output.back())) output.pop_back();
  }
  if (output.size() < 3) output.clear();
  return output;
}

}  // namespace monoloc
