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

#include "gsacert/finetune.h"

#include <algorithm>
#include <cmath>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

constexpr double kOrthoTol = 1e-10;

double ortho_defect(const Mat& q) {
  return (q.transpose() * q - Mat::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

Mat polar(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

ScaleDisruption scale_disruption(const Vec& s, const Vec& c_base) {
  const Index n = s.size();
  if (n < 2 || c_base.size() != n) {
    fail(ErrorKind::kInput, "scale_disruption: need at least two scales and matching base scales");
  }
  if (!(s.minCoeff() > 0) || !(c_base.minCoeff() > 0)) {
    fail(ErrorKind::kInput, "scale_disruption: nonpositive scale");
  }
  ScaleDisruption d;
  d.n = n;
  // Scalar log: the vectorized one can differ by an ulp between lanes.
  const Vec l = s.unaryExpr([](double x) { return std::log(x); });
  const double mean = l.mean();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double dl = l(i) - l(j);
      d.d_log += dl * dl;
      const double r = s(i) / s(j) - 1.0, c = c_base(i) / c_base(j);
      d.d_ratio += r * r * c * c;
      d.max_pair_log = std::max(d.max_pair_log, std::abs(dl));
    }
  }
  d.variance_form = n * (l.array() - mean).square().sum();
  d.envelope = std::sqrt(2.0 * d.d_log / n);
  d.envelope_holds = d.max_pair_log <= d.envelope * (1.0 + 1e-12) + 1e-300;
  return d;
}

double coherent_double_sum(const Vec& sigma, const Mat& q, double s) {
  double acc = 0.0;
  for (Index a = 0; a < sigma.size(); ++a) {
    for (Index b = 0; b < sigma.size(); ++b) {
      const double diff = s * sigma(b) - sigma(a);
      acc += q(a, b) * q(a, b) * diff * diff;
    }
  }
  return acc;
}

FrameRotationCost frame_rotation_cost(const Vec& sigma, const Mat& q_u, const Mat& q_v,
                                      const Vec& sigma_post) {
  const Index d = sigma.size();
  if (q_u.rows() != d || q_u.cols() != d || q_v.rows() != d || q_v.cols() != d ||
      sigma_post.size() != d) {
    fail(ErrorKind::kDimension, "frame_rotation_cost: frames must be d x d with d = " + std::to_string(d));
  }
  if (ortho_defect(q_u) > kOrthoTol || ortho_defect(q_v) > kOrthoTol) {
    fail(ErrorKind::kInput, "frame_rotation_cost: non-orthogonal frame");
  }
  if (sigma_post.size() && sigma_post.minCoeff() < 0) {
    fail(ErrorKind::kInput, "frame_rotation_cost: negative post singular value");
  }
  const Mat base = sigma.asDiagonal();
  FrameRotationCost c;
  c.delta_w = (q_u * sigma_post.asDiagonal() * q_v.transpose() - base).norm();
  c.relative_rotation_norm = (q_u.transpose() * q_v - Mat::Identity(d, d)).norm();

  if (d == 0 || !(sigma(0) > 0)) return c;
  const double s = sigma_post(0) / sigma(0);
  if (!(s > 0) || (sigma_post - s * sigma).cwiseAbs().maxCoeff() > 1e-12 * sigma_post.cwiseAbs().maxCoeff()) {
    return c;
  }
  c.uniform_scale = s;
  if ((q_u - q_v).cwiseAbs().maxCoeff() <= kOrthoTol) {
    c.coherent_cost = std::sqrt(coherent_double_sum(sigma, q_u, s));
  }
  const double sigma_d = sigma(d - 1);
  if (sigma_d > 0) {
    const double common = (q_u * (s * sigma).asDiagonal() * q_u.transpose() - base).norm();
    c.bound = (c.delta_w + common) / (s * sigma_d);
    c.bound_holds = c.relative_rotation_norm <= c.bound * (1.0 + 1e-12) + 1e-14;
  }
  return c;
}

RecoveredFrames recover_frames(const GaugedSvd& base, const Mat& w_post) {
  if (w_post.rows() != base.rows() || w_post.cols() != base.cols()) {
    fail(ErrorKind::kDimension, "recover_frames: post layer shape differs from base");
  }
  const GaugedSvd post = gauged_svd(w_post, base.rank_cutoff);
  RecoveredFrames r;
  const Mat qu = base.u.transpose() * post.u;
  const Mat qv = base.v.transpose() * post.v;
  r.orthogonality_defect = std::max(ortho_defect(qu), ortho_defect(qv));
  if (r.orthogonality_defect > kFrameRecoveryTolerance) {
    fail(ErrorKind::kInput, "recover_frames: post frames leave the base singular subspaces (defect " +
                                std::to_string(r.orthogonality_defect) + ")");
  }
  r.q_u = polar(qu);
  r.q_v = polar(qv);
  r.sigma_post = post.sigma;
  return r;
}

}  // namespace gsacert
