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

// Pinhole camera relations and oriented 3D boxes in KITTI camera coordinates
// (x right, y down, z forward).

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "monoloc/kitti_io.hpp"

namespace monoloc {

struct Point2 {
  double x = 0.0;
  double z = 0.0;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

// Lateral (u) and vertical (v) metric offsets from the optical axis.
struct MetricOffset {
  double u = 0.0;
  double v = 0.0;
};

// 2D detection box given by centre and size, in pixels.
struct Box2D {
  double center_u = 0.0;
  double center_v = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::optional<double> confidence;

  static Box2D FromCorners(const PixelBox& b);
};

// Oriented box. `center` follows the KITTI convention: it is the centre of
// the bottom face and the box spans [center.y - height, center.y].
struct Box3D {
  Vec3 center;
  Dimensions dims;
  double yaw = 0.0;

  static Box3D FromAnnotation(const ObjectAnnotation& a);
  double volume() const { return dims.height * dims.width * dims.length; }
  double top() const { return center.y - dims.height; }
  double bottom() const { return center.y; }
};

// Bottom face counter-clockwise in (x, z), then the top face in the same
// order, so corner k + 4 sits directly above corner k.
struct CornerSet {
  std::array<Vec3, 8> corners;
};

struct BevPolygon {
  std::array<Point2, 4> vertices;
};

// Throws DomainError unless all dimensions are positive.
void validate_box(const Box3D& box);

/// Metric offsets of an image point at a known depth:
/// u = (u2d - theta) * depth / f, v = (v2d - phi) * depth / f.
/// Translation terms of P2 are not used.
MetricOffset inverse_project(PixelPoint center, double depth,
                             const CameraCalibration& calib);

/// u = f * x / z + theta, v = f * y / z + phi.
PixelPoint forward_project(const Vec3& point, const CameraCalibration& calib);

CornerSet box3d_corners(const Box3D& box);

BevPolygon bev_footprint(const Box3D& box);

// Shoelace area; positive for counter-clockwise vertex order in (x, z).
double signed_area(std::span<const Point2> polygon);

// Intersection of two convex counter-clockwise polygons. Vertices closer
// than 1e-9 are merged. Returns an empty vector when they do not overlap.
std::vector<Point2> convex_intersection(std::span<const Point2> subject,
                                        std::span<const Point2> clip);

}  // namespace monoloc
