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

#include "gsacert/transport.h"

#include <cmath>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

void check_interface(const GaugedSvd& k, const GaugedSvd& k1) {
  if (k1.cols() != k.rows()) {
    fail(ErrorKind::kDimension,
         "transport: W_{k+1} has " + std::to_string(k1.cols()) + " columns but W_k has " +
             std::to_string(k.rows()) + " rows");
  }
}

void check_window(const GaugedSvd& s, Index r, const char* side) {
  if (r < 1 || r > s.d_sp) {
    fail(ErrorKind::kRange, std::string("transport: ") + side + " window " +
                                std::to_string(r) + " outside [1," +
                                std::to_string(s.d_sp) + "]");
  }
}

}  // namespace

const char* variant_name(TransportVariant v) {
  switch (v) {
    case TransportVariant::kAng: return "ang";
    case TransportVariant::kSrc: return "src";
    case TransportVariant::kTgt: return "tgt";
    case TransportVariant::kTotal: return "total";
    case TransportVariant::kOutAng: return "out_ang";
    case TransportVariant::kOut: return "out";
    case TransportVariant::kOutTotal: return "out_total";
    case TransportVariant::kPhys: return "phys";
  }
  return "?";
}

TransportVariant parse_variant(const std::string& name) {
  for (auto v : {TransportVariant::kAng, TransportVariant::kSrc, TransportVariant::kTgt,
                 TransportVariant::kTotal, TransportVariant::kOutAng, TransportVariant::kOut,
                 TransportVariant::kOutTotal, TransportVariant::kPhys}) {
    if (name == variant_name(v)) return v;
  }
  fail(ErrorKind::kConfig, "unknown transport variant '" + name + "'");
}

const char* row_coords_name(RowCoords c) {
  return c == RowCoords::kLatent ? "latent" : "physical-output";
}
const char* col_coords_name(ColCoords c) {
  return c == ColCoords::kSourceMode ? "source-mode" : "physical-input";
}

RowCoords row_coords_of(TransportVariant v) {
  switch (v) {
    case TransportVariant::kAng:
    case TransportVariant::kSrc:
    case TransportVariant::kTgt:
    case TransportVariant::kTotal:
      return RowCoords::kLatent;
    default:
      return RowCoords::kPhysicalOutput;
  }
}

ColCoords col_coords_of(TransportVariant v) {
  return v == TransportVariant::kPhys ? ColCoords::kPhysicalInput : ColCoords::kSourceMode;
}

TransportMatrix build_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                                TransportVariant variant, Index rs, Index rt,
                                bool target_truncated) {
  check_interface(svd_k, svd_k1);
  check_window(svd_k, rs, "source");
  check_window(svd_k1, rt, "target");

  const auto u_k = svd_k.u.leftCols(rs);
  const auto s_k = svd_k.sigma.head(rs).asDiagonal();
  const auto u_k1 = svd_k1.u.leftCols(rt);
  const auto s_k1 = svd_k1.sigma.head(rt).asDiagonal();
  const Mat ang = svd_k1.v.leftCols(rt).transpose() * u_k;
  auto target = [&]() -> Mat {
    return target_truncated ? truncate(svd_k1, rt) : svd_k1.reconstruct();
  };

  TransportMatrix t;
  t.variant = variant;
  t.row_coords = row_coords_of(variant);
  t.col_coords = col_coords_of(variant);
  t.rs = rs;
  t.rt = rt;
  t.target_truncated = target_truncated;
  switch (variant) {
    case TransportVariant::kAng: t.entries = ang; break;
    case TransportVariant::kSrc: t.entries = ang * s_k; break;
    case TransportVariant::kTgt: t.entries = s_k1 * ang; break;
    case TransportVariant::kTotal: t.entries = s_k1 * ang * s_k; break;
    case TransportVariant::kOutAng: t.entries = u_k1 * ang; break;
    case TransportVariant::kOut: t.entries = target() * u_k; break;
    case TransportVariant::kOutTotal: t.entries = target() * u_k * s_k; break;
    case TransportVariant::kPhys: t.entries = target() * truncate(svd_k, rs); break;
  }
  const bool uses_target = variant == TransportVariant::kOut ||
                           variant == TransportVariant::kOutTotal ||
                           variant == TransportVariant::kPhys;
  if (uses_target && !target_truncated) {
    t.target_tail_residual = std::sqrt(tail_energy(svd_k1, rt));
  }
  return t;
}

Mat full_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1) {
  check_interface(svd_k, svd_k1);
  return svd_k1.reconstruct() * svd_k.u * svd_k.sigma.asDiagonal();
}

Mat padded_truncated_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                               Index rs, Index rt) {
  check_interface(svd_k, svd_k1);
  if (rs < 0 || rs > svd_k.d_sp) fail(ErrorKind::kRange, "transport: source window out of range");
  Mat out = Mat::Zero(svd_k1.rows(), svd_k.size());
  out.leftCols(rs) = truncate(svd_k1, rt) * svd_k.u.leftCols(rs) *
                     svd_k.sigma.head(rs).asDiagonal();
  return out;
}

double truncation_bound(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, Index rs,
                        Index rt) {
  return svd_k1.op_norm() * std::sqrt(tail_energy(svd_k, rs)) +
         svd_k.op_norm() * std::sqrt(tail_energy(svd_k1, rt));
}

TruncationError truncation_error(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                                 Index rs, Index rt, TruncationMode mode) {
  TruncationError e;
  e.rs = rs;
  e.rt = rt;
  e.mode = mode;
  e.bound = truncation_bound(svd_k, svd_k1, rs, rt);
  const Mat diff = full_transport(svd_k, svd_k1) - padded_truncated_transport(svd_k, svd_k1, rs, rt);
  e.measured = diff.norm();
  e.measured_physical = (diff * svd_k.v.transpose()).norm();
  if (mode == TruncationMode::kPhysical) std::swap(e.measured, e.measured_physical);
  return e;
}

}  // namespace gsacert
