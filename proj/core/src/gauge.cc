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

#include "gsacert/gauge.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

constexpr Index kJacobiLimit = 200;

template <int Options>
void run_svd(const Mat& w, Mat* u, Vec* s, Mat* v) {
  if (std::min(w.rows(), w.cols()) <= kJacobiLimit) {
    Eigen::JacobiSVD<Mat> svd(w, Options);
    *s = svd.singularValues();
    if (u) *u = svd.matrixU();
    if (v) *v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Mat> svd(w, Options);
    *s = svd.singularValues();
    if (u) *u = svd.matrixU();
    if (v) *v = svd.matrixV();
  }
}

void check_range(const GaugedSvd& svd, Index r, const char* op) {
  if (r < 0 || r > svd.d_sp) {
    fail(ErrorKind::kRange, std::string(op) + ": rank " + std::to_string(r) +
                                " outside [0, " + std::to_string(svd.d_sp) +
                                "]");
  }
}

// Descending lexicographic comparison on rounded entries.
bool rounded_greater(const Mat& u, Index a, Index b) {
  for (Index r = 0; r < u.rows(); ++r) {
    const double x = std::round(u(r, a) / kOrderRounding);
    const double y = std::round(u(r, b) / kOrderRounding);
    if (x != y) return x > y;
  }
  return false;
}

}  // namespace

Mat GaugedSvd::reconstruct() const {
  return u * sigma.asDiagonal() * v.transpose();
}

bool all_finite(const Mat& a) { return a.allFinite(); }

Mat square_embed(const Mat& w) {
  const Index d = std::max(w.rows(), w.cols());
  Mat out = Mat::Zero(d, d);
  out.topLeftCorner(w.rows(), w.cols()) = w;
  return out;
}

LayerMatrix square_embed(const LayerMatrix& layer) {
  return {layer.label, square_embed(layer.w)};
}

void fix_column_signs(Mat& frame, Mat* follower) {
  for (Index c = 0; c < frame.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < frame.rows(); ++r) {
      const double a = std::abs(frame(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (frame.rows() > 0 && frame(arg, c) < 0) {
      frame.col(c) *= -1.0;
      if (follower) follower->col(c) *= -1.0;
    }
  }
}

GaugedSvd gauged_svd(const Mat& w, double rank_cutoff) {
  if (!w.allFinite()) fail(ErrorKind::kInput, "gauged_svd: non-finite entry");
  GaugedSvd out;
  out.rank_cutoff = rank_cutoff;
  run_svd<Eigen::ComputeThinU | Eigen::ComputeThinV>(w, &out.u, &out.sigma,
                                                     &out.v);
  fix_column_signs(out.u, &out.v);

  const Index p = out.sigma.size();
  const double s1 = p ? out.sigma(0) : 0.0;
  Index start = 0;
  while (start < p) {
    Index end = start + 1;
    while (end < p && out.sigma(end - 1) - out.sigma(end) <= kClusterGap * s1)
      ++end;
    if (end - start > 1) {
      std::vector<Index> order(end - start);
      std::iota(order.begin(), order.end(), start);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return rounded_greater(out.u, a, b);
      });
      Mat u_blk(out.u.rows(), end - start), v_blk(out.v.rows(), end - start);
      Vec s_blk(end - start);
      for (Index k = 0; k < end - start; ++k) {
        u_blk.col(k) = out.u.col(order[k]);
        v_blk.col(k) = out.v.col(order[k]);
        s_blk(k) = out.sigma(order[k]);
      }
      out.u.middleCols(start, end - start) = u_blk;
      out.v.middleCols(start, end - start) = v_blk;
      out.sigma.segment(start, end - start) = s_blk;
    }
    start = end;
  }

  out.d_sp = 0;
  for (Index i = 0; i < p; ++i) {
    if (out.sigma(i) > 0 && out.sigma(i) >= rank_cutoff * s1) ++out.d_sp;
  }
  return out;
}

double tail_energy(const GaugedSvd& svd, Index r) {
  check_range(svd, r, "tail_energy");
  double acc = 0.0;
  for (Index i = svd.size() - 1; i >= r; --i) acc += svd.sigma(i) * svd.sigma(i);
  return acc;
}

Mat truncate(const GaugedSvd& svd, Index r) {
  check_range(svd, r, "truncate");
  return svd.u.leftCols(r) * svd.sigma.head(r).asDiagonal() *
         svd.v.leftCols(r).transpose();
}

Vec singular_values(const Mat& a) {
  Vec s;
  if (a.size() == 0) return Vec();
  run_svd<0>(a, nullptr, &s, nullptr);
  return s;
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  // Only the top value is needed; divide-and-conquer is faster and exact enough.
  if (std::min(a.rows(), a.cols()) > 16) return Eigen::BDCSVD<Mat>(a).singularValues()(0);
  return singular_values(a)(0);
}

}  // namespace gsacert
