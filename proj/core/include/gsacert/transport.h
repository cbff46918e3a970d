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

#ifndef GSACERT_TRANSPORT_H_
#define GSACERT_TRANSPORT_H_

#include <string>

#include "gsacert/gauge.h"

namespace gsacert {

enum class TransportVariant { kAng, kSrc, kTgt, kTotal, kOutAng, kOut, kOutTotal, kPhys };
enum class RowCoords { kLatent, kPhysicalOutput };
enum class ColCoords { kSourceMode, kPhysicalInput };

const char* variant_name(TransportVariant v);
TransportVariant parse_variant(const std::string& name);
const char* row_coords_name(RowCoords c);
const char* col_coords_name(ColCoords c);
RowCoords row_coords_of(TransportVariant v);
ColCoords col_coords_of(TransportVariant v);

struct TransportMatrix {
  Mat entries;
  TransportVariant variant = TransportVariant::kAng;
  RowCoords row_coords = RowCoords::kLatent;
  ColCoords col_coords = ColCoords::kSourceMode;
  Index rs = 0;
  Index rt = 0;
  Index interface_index = 0;
  // Physical-output variants: W_{k+1} replaced by its rank-rt truncation.
  bool target_truncated = false;
  // E_{>rt}(W_{k+1})^{1/2}; the residual left in when the target is not
  // truncated.
  double target_tail_residual = 0.0;
};

// svd_k and svd_k1 are the layers W_k and W_{k+1}; W_{k+1} W_k must compose.
TransportMatrix build_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                                TransportVariant variant, Index rs, Index rt,
                                bool target_truncated = false);

// Full source transport W_{k+1} U_k Sigma_k over every computed source mode.
Mat full_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1);

// W_{k+1}^[rt] U_k^(rs) Sigma_k^(rs), zero-padded to the width of the full
// transport.
Mat padded_truncated_transport(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                               Index rs, Index rt);

enum class TruncationMode { kSourceMode, kPhysical };

struct TruncationError {
  double bound = 0.0;
  double measured = 0.0;
  // The same residual realized through V_k^T; equal to `measured` up to
  // rounding since V_k^T has orthonormal rows.
  double measured_physical = 0.0;
  Index rs = 0;
  Index rt = 0;
  TruncationMode mode = TruncationMode::kSourceMode;
};

double truncation_bound(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, Index rs,
                        Index rt);
TruncationError truncation_error(const GaugedSvd& svd_k, const GaugedSvd& svd_k1,
                                 Index rs, Index rt,
                                 TruncationMode mode = TruncationMode::kSourceMode);

}  // namespace gsacert

#endif  // GSACERT_TRANSPORT_H_
