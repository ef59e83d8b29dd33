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

#include "monoloc/locality_reg.hpp"

#include <cmath>
#include <string>

#include "monoloc/error.hpp"

namespace monoloc {

namespace {

void CheckShapes(const LinearHead& head, const FeatureBatch& batch,
                 const SimilarityGraph& graph) {
  validate_batch(batch);
  if (head.feature_dim() != batch.feature_dim()) {
    throw DimensionError("head expects " + std::to_string(head.feature_dim()) +
                         " features, batch has " + std::to_string(batch.feature_dim()));
  }
  if (graph.size() != batch.size() || graph.p.rows() != batch.size() ||
      graph.p.cols() != batch.size()) {
    throw DimensionError("graph size does not match batch size");
  }
}

}  // namespace

LinearHead LinearHead::Zero(Eigen::Index feature_dim) {
  LinearHead h;
  h.w = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, feature_dim);
  h.b.setZero();
  return h;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> LinearHead::predict(
    const Eigen::MatrixXd& x) const {
  if (x.rows() != w.cols()) throw DimensionError("feature dimension mismatch");
  Eigen::Matrix<double, 2, Eigen::Dynamic> y = w * x;
  y.colwise() += b;
  return y;
}

Eigen::VectorXd normalize_offsets(const Eigen::VectorXd& u2d_pixels, double image_width) {
  if (!(image_width > 0.0)) throw DomainError("image width must be positive");
  return u2d_pixels / image_width;
}

double similarity(double u_i, double u_j, double z_i, double z_j, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double du = u_i - u_j;
  const double dz = z_i - z_j;
  return std::exp(-(du * du) - (dz * dz) / lambda);
}

void validate_batch(const FeatureBatch& batch) {
  const Eigen::Index m = batch.size();
  if (m < 1) throw DimensionError("batch must hold at least one object");
  if (batch.u2d.size() != m || batch.z3d.size() != m) {
    throw DimensionError("u2d/z3d lengths must equal the number of feature columns");
  }
  if ((batch.z3d.array() <= 0.0).any()) throw DomainError("depths must be positive");
}

SimilarityGraph build_graph(const FeatureBatch& batch, double lambda) {
  validate_batch(batch);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const Eigen::Index m = batch.size();
  SimilarityGraph g;
  g.lambda = lambda;
  g.s.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    g.s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = similarity(batch.u2d(i), batch.u2d(j), batch.z3d(i),
                                  batch.z3d(j), lambda);
      g.s(i, j) = v;
      g.s(j, i) = v;
    }
  }
  g.d = g.s.rowwise().sum();
  g.p = -g.s;
  // d_i - s_ii cancels badly when the off-diagonal weights are tiny; sum them
  // directly instead.
  for (Eigen::Index i = 0; i < m; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) off += g.s(i, j);
    }
    g.p(i, i) = off;
  }
  return g;
}

double reg_pairwise(const LinearHead& head, const FeatureBatch& batch,
                    const SimilarityGraph& graph, double beta) {
  CheckShapes(head, batch, graph);
  const Eigen::Index m = batch.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Vector2d diff = head.w * (batch.x.col(i) - batch.x.col(j));
      sum += diff.squaredNorm() * graph.s(i, j);
    }
  }
  return 0.5 * beta * sum;
}

double reg_trace(const LinearHead& head, const FeatureBatch& batch,
                 const SimilarityGraph& graph, double beta) {
  CheckShapes(head, batch, graph);
  const Eigen::MatrixXd wx = head.w * batch.x;  // 2 x M
  return beta * (wx * graph.p * wx.transpose()).trace();
}

Eigen::Matrix<double, 2, Eigen::Dynamic> reg_gradient(const LinearHead& head,
                                                      const FeatureBatch& batch,
                                                      const SimilarityGraph& graph,
                                                      double beta) {
  CheckShapes(head, batch, graph);
  const Eigen::MatrixXd wx = head.w * batch.x;
  return 2.0 * beta * (wx * graph.p) * batch.x.transpose();
}

}  // namespace monoloc
