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

// Test-only reference implementations. None of these call into the code
// paths they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace monoloc::oracle {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct OrientedBox {
  double x, y, z;        // bottom-face centre
  double h, w, l;
  double yaw;
};

// Point membership via the inverse yaw rotation.
inline bool contains(const OrientedBox& b, double px, double py, double pz) {
  if (py > b.y || py < b.y - b.h) return false;
  const double dx = px - b.x;
  const double dz = pz - b.z;
  // Object frame from camera frame: rotate by -yaw about y.
  const double c = std::cos(-b.yaw);
  const double s = std::sin(-b.yaw);
  const double lx = c * dx + s * dz;
  const double lz = -s * dx + c * dz;
  return std::abs(lx) <= b.l / 2 && std::abs(lz) <= b.w / 2;
}

// Samples uniformly inside `a` and counts the fraction that also lies in
// `b`; IoU follows from the box volumes.
inline double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b,
                              std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double lx = unit(rng) * a.l;
    const double lz = unit(rng) * a.w;
    const double ly = (unit(rng) + 0.5) * a.h;
    const double px = a.x + c * lx + s * lz;
    const double pz = a.z - s * lx + c * lz;
    const double py = a.y - ly;
    hits += contains(b, px, py, pz);
  }
  const double va = a.h * a.w * a.l;
  const double vb = b.h * b.w * b.l;
  const double inter = va * static_cast<double>(hits) / static_cast<double>(samples);
  return inter / (va + vb - inter);
}

struct Det {
  double score;
  bool tp;
};

// Threshold sweep by brute force: for each candidate threshold, recount
// every detection. Recall levels are compared with exact integer products.
inline double ap_bruteforce(const std::vector<Det>& dets, long n_gt, int levels,
                            bool include_zero) {
  std::vector<double> thresholds;
  for (const auto& d : dets) thresholds.push_back(d.score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  struct Pt {
    long tp, fp;
  };
  std::vector<Pt> pts;
  for (double t : thresholds) {
    Pt p{0, 0};
    for (const auto& d : dets) {
      if (d.score >= t) (d.tp ? p.tp : p.fp)++;
    }
    pts.push_back(p);
  }
  long total_tp = 0;
  for (const auto& d : dets) total_tp += d.tp;
  if (total_tp == 0) return 0.0;
  double sum = 0.0;
  int count = 0;
  for (int k = include_zero ? 0 : 1; k <= levels; ++k, ++count) {
    double best = k == 0 ? 1.0 : 0.0;
    for (const auto& p : pts) {
      if (p.tp * levels >= static_cast<long>(k) * n_gt) {
        best = std::max(best, static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp));
      }
    }
    sum += best;
  }
  return sum / count;
}

// Central difference of f around x[i].
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

}  // namespace monoloc::oracle
