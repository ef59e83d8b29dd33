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

// Geometric-locality-preserving regulariser for the linear 3D-centre head.
//
// Objects that sit close together horizontally in the image and at similar
// depth get a large similarity weight s_ij; the regulariser penalises the
// head for mapping such pairs far apart:
//
//   R(W) = beta/2 * sum_ij s_ij * |W x_i - W x_j|^2
//        = beta * tr(W X P X^T W^T),   P = D - S,  d_ii = sum_j s_ij.
//
// Sums run over all ordered pairs; R is not normalised by batch size.

#pragma once

#include <Eigen/Core>

namespace monoloc {

inline constexpr double kDefaultLambda = 100.0;
inline constexpr double kDefaultBeta = 10.0;

struct SimilarityGraph {
  Eigen::MatrixXd s;  // M x M, symmetric, entries in (0, 1]
  Eigen::VectorXd d;  // degrees
  Eigen::MatrixXd p;  // Laplacian D - S
  double lambda = kDefaultLambda;

  Eigen::Index size() const { return s.rows(); }
};

// y = W x + b with y = (u3d, z3d).
struct LinearHead {
  Eigen::Matrix<double, 2, Eigen::Dynamic> w;
  Eigen::Vector2d b = Eigen::Vector2d::Zero();

  static LinearHead Zero(Eigen::Index feature_dim);
  Eigen::Index feature_dim() const { return w.cols(); }
  // 2 x M predictions for the columns of `x`.
  Eigen::Matrix<double, 2, Eigen::Dynamic> predict(const Eigen::MatrixXd& x) const;
};

// Column i of `x` is the feature vector of object i. `u2d` holds the
// horizontal image offsets exactly as they enter the similarity kernel
// (normalised by image width unless a caller opts into raw pixels).
struct FeatureBatch {
  Eigen::MatrixXd x;
  Eigen::VectorXd u2d;
  Eigen::VectorXd z3d;

  Eigen::Index size() const { return x.cols(); }
  Eigen::Index feature_dim() const { return x.rows(); }
};

// Divides pixel offsets by the image width.
Eigen::VectorXd normalize_offsets(const Eigen::VectorXd& u2d_pixels, double image_width);

/// s = exp(-(u_i - u_j)^2) / exp((z_i - z_j)^2 / lambda), evaluated as a
/// single exponential of the summed log terms. Throws DomainError for
/// lambda <= 0.
double similarity(double u_i, double u_j, double z_i, double z_j, double lambda);

// Throws DimensionError on inconsistent lengths or an empty batch,
// DomainError on non-positive depths.
void validate_batch(const FeatureBatch& batch);

/// Fills S over all pairs from the ground-truth depths in `batch`.
SimilarityGraph build_graph(const FeatureBatch& batch, double lambda = kDefaultLambda);

/// Direct double sum over ordered pairs.
double reg_pairwise(const LinearHead& head, const FeatureBatch& batch,
                    const SimilarityGraph& graph, double beta = kDefaultBeta);

/// Trace form beta * tr(W X P X^T W^T); equal to reg_pairwise.
double reg_trace(const LinearHead& head, const FeatureBatch& batch,
                 const SimilarityGraph& graph, double beta = kDefaultBeta);

/// dR/dW = 2 beta W X P X^T (X P X^T is symmetric). 2 x n.
Eigen::Matrix<double, 2, Eigen::Dynamic> reg_gradient(const LinearHead& head,
                                                      const FeatureBatch& batch,
                                                      const SimilarityGraph& graph,
                                                      double beta = kDefaultBeta);

}  // namespace monoloc
