/* Copyright 2026 The gsacert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GSACERT_GAUGE_H_
#define GSACERT_GAUGE_H_

#include <string>

#include <Eigen/Dense>

namespace gsacert {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct LayerMatrix {
  std::string label;
  Mat w;
};

constexpr double kDefaultRankCutoff = 1e-12;
// Two singular values closer than this (relative to sigma_1) share a cluster.
constexpr double kClusterGap = 1e-12;
// Entry rounding used to order frame columns inside a cluster.
constexpr double kOrderRounding = 1e-9;

// Thin SVD W = U diag(sigma) V^T in the deterministic gauge: sigma
// nonincreasing, equal-sigma clusters ordered lexicographically (descending)
// by rounded U entries, and the largest-magnitude entry of every U column
// positive (first maximal index on ties). V follows U's signs.
struct GaugedSvd {
  Mat u;
  Vec sigma;
  Mat v;
  Index d_sp = 0;  // count of sigma_i >= rank_cutoff * sigma_1, sigma_i > 0
  double rank_cutoff = kDefaultRankCutoff;

  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }
  Index size() const { return sigma.size(); }
  double op_norm() const { return sigma.size() ? sigma(0) : 0.0; }
  double frob_sq() const { return sigma.squaredNorm(); }
  Mat reconstruct() const;
};

Mat square_embed(const Mat& w);
LayerMatrix square_embed(const LayerMatrix& layer);

GaugedSvd gauged_svd(const Mat& w, double rank_cutoff = kDefaultRankCutoff);

// Sum of sigma_i^2 for i > r. Requires 0 <= r <= d_sp.
double tail_energy(const GaugedSvd& svd, Index r);

// Rank-r truncation U^(r) Sigma^(r) V^(r)^T. Requires 0 <= r <= d_sp.
Mat truncate(const GaugedSvd& svd, Index r);

// Largest singular value, computed without frames.
double op_norm(const Mat& a);
Vec singular_values(const Mat& a);

// Flip column signs so the largest-|entry| of each column is positive. The
// same flips are applied to the matching columns of `follower` if given.
void fix_column_signs(Mat& frame, Mat* follower);

bool all_finite(const Mat& a);

}  // namespace gsacert

#endif  // GSACERT_GAUGE_H_
