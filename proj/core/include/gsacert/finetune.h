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

#ifndef GSACERT_FINETUNE_H_
#define GSACERT_FINETUNE_H_

#include <limits>

#include "gsacert/gauge.h"

namespace gsacert {

struct ScaleDisruption {
  Index n = 0;
  double d_log = 0.0;
  double d_ratio = 0.0;
  double variance_form = 0.0;  // N sum (l_i - mean)^2
  double max_pair_log = 0.0;   // max |log(s_i/s_j)|
  double envelope = 0.0;       // sqrt(2 D_log / N)
  bool envelope_holds = false;
};

// s_i = C_post_i / C_base_i.
ScaleDisruption scale_disruption(const Vec& s, const Vec& c_base);

struct FrameRotationCost {
  double delta_w = 0.0;  // ||Q_U Sigma_post Q_V^T - Sigma||_F
  // Uniform scale plus common rotation only; NaN otherwise.
  double coherent_cost = std::numeric_limits<double>::quiet_NaN();
  double uniform_scale = std::numeric_limits<double>::quiet_NaN();
  double relative_rotation_norm = 0.0;  // ||Q_U^T Q_V - I||_F
  // (delta_w + ||Q_U (s Sigma) Q_U^T - Sigma||_F) / (s sigma_d); NaN unless
  // Sigma_post = s Sigma with sigma_d > 0.
  double bound = std::numeric_limits<double>::quiet_NaN();
  bool bound_holds = true;
};

// Sum_ab q_ab^2 (s sigma_b - sigma_a)^2.
double coherent_double_sum(const Vec& sigma, const Mat& q, double s);

FrameRotationCost frame_rotation_cost(const Vec& sigma, const Mat& q_u, const Mat& q_v,
                                      const Vec& sigma_post);

struct RecoveredFrames {
  Mat q_u;
  Mat q_v;
  Vec sigma_post;
  double orthogonality_defect = 0.0;  // before polar projection
};

constexpr double kFrameRecoveryTolerance = 1e-6;

// Q_U = U^T U_post, Q_V = V^T V_post, polar-projected onto O(d).
RecoveredFrames recover_frames(const GaugedSvd& base, const Mat& w_post);

}  // namespace gsacert

#endif  // GSACERT_FINETUNE_H_
