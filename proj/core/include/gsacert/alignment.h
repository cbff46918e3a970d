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

#ifndef GSACERT_ALIGNMENT_H_
#define GSACERT_ALIGNMENT_H_

#include <limits>
#include <string>
#include <vector>

#include "gsacert/gauge.h"

namespace gsacert {

using IndexSet = std::vector<Index>;  // sorted ascending
using IndexSets = std::vector<IndexSet>;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Singular values at or below this fraction of a block's sigma_1 count as zero.
constexpr double kPositiveSigmaCutoff = 1e-12;

// Signal groups R_1..R_K are groups[0..K-1]; unassigned rows form R_0.
struct RowPartition {
  IndexSets groups;
  IndexSet unassigned;
  std::vector<int> group_of_row;  // -1 for R_0
  // Mode-profile rule only.
  std::vector<Index> mode_of_group;
  Vec winner_score;  // omega of the winning mode per row
  Vec runner_up;     // second largest omega per row (0 when R = 1)
  Vec threshold_margin;  // winner - theta
  Vec gap_margin;        // winner - runner-up
  double theta = 0.0;
  double mu = 0.0;
  double entry_bound = 0.0;  // max |Y|

  Index rows() const { return static_cast<Index>(group_of_row.size()); }
  Index size() const { return static_cast<Index>(groups.size()); }
};

RowPartition mode_profile_partition(const Mat& y, double theta, double mu);
// External labels: 0 is R_0, positive ids are signal groups (ordered by id).
RowPartition partition_from_labels(const std::vector<int>& labels);

// Sufficient condition for an entrywise perturbation of Y of size delta to
// leave row r's assignment unchanged.
bool row_assignment_stable(const RowPartition& p, Index r, double delta);
bool partition_stable(const RowPartition& p, double delta);

// Either fixed sizes s_i or energy fractions tau_i; a single entry applies to
// every group.
struct SupportRule {
  std::vector<Index> sizes;
  std::vector<double> fractions;
};

struct ActiveSets {
  IndexSets sets;
  std::vector<Index> size;
  std::vector<double> gap;  // kInf when s_i = n
  std::vector<Vec> score;   // q_i(c) per column
};

ActiveSets active_columns(const Mat& m, const RowPartition& rows, const SupportRule& rule);

struct AlignmentStructure {
  RowPartition rows;
  ActiveSets active;
  std::vector<Index> row_perm;
  std::vector<Index> col_perm;
  Index cols = 0;
  Index size() const { return rows.size(); }
};

AlignmentStructure extract_structure(const Mat& m, const RowPartition& rows,
                                     const SupportRule& rule);

double sigma_min_plus(const Mat& block);

struct PairMargin {
  Index i = 0;
  Index j = 0;
  double core_ij = 0.0;  // sigma_min^+ of Core_{i\j}
  double core_ji = 0.0;
  double m = 0.0;
  double o = 0.0;
  double overlap_frob = 0.0;
  double delta_sigma = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  bool shares_support = false;
  bool nondegenerate = false;
  bool one_third_holds = false;
  bool half_gap_holds = false;
  bool frobenius_holds = false;
  double slack = 0.0;  // m - 3o
};

std::vector<PairMargin> pairwise_margins(const Mat& m, const AlignmentStructure& s);

enum class MaskLabel : int { kNoise = 0, kCore = 1, kOverlap = 2 };

struct CoreOverlapNoise {
  Mat core;
  Mat overlap;
  Mat noise;
  Eigen::MatrixXi mask;
  IndexSets dedicated;
  IndexSets shared;
  double core_frob = 0.0;
  double overlap_frob = 0.0;
  double noise_frob = 0.0;
  double total_frob = 0.0;
};

CoreOverlapNoise decompose(const Mat& m, const AlignmentStructure& s);

struct HubInfo {
  Index column = 0;
  IndexSet groups;
  double energy = 0.0;       // E_c
  double min_segment = 0.0;  // smallest segment norm among the groups
  double bound = 0.0;        // sqrt(E_c / deg)
  bool bound_holds = false;
};

struct Incidence {
  std::vector<Index> degree;                    // per column
  std::vector<std::pair<Index, Index>> edges;   // (group, column)
  std::vector<std::pair<Index, Index>> shared;  // group pairs sharing a column
  IndexSet hubs;
  std::vector<HubInfo> hub_info;
};

Incidence incidence(const AlignmentStructure& s, const Mat& m);

struct PairRadius {
  Index i = 0;
  Index j = 0;
  double r = 0.0;
};

struct CertificateRadius {
  double r_cert = 0.0;
  std::vector<double> r_gamma;
  std::vector<PairRadius> r_pair;  // nondegenerate pairs only
  bool margins_positive = false;
};

// Largest ||E||_F keeping an active-column gap: -F + sqrt(F^2 + gap/2).
double gap_radius(double frob, double gap);
// Largest ||E||_F keeping a pair's one-third margin: (m - 3o)/4.
double pair_radius(double m, double o);
CertificateRadius certificate_radius(const Mat& m, const AlignmentStructure& s,
                                     const std::vector<PairMargin>& pairs);

struct StabilityVerdict {
  double eta = 0.0;
  double omega = 0.0;
  bool gaps_ok = false;
  bool pairs_ok = false;
  bool certified = false;
};

StabilityVerdict stability_check(const Mat& m, const AlignmentStructure& s,
                                 const std::vector<PairMargin>& pairs, double eta);

// Re-extract active sets from a perturbed matrix using the same row groups and
// sizes s_i = |C_i|.
AlignmentStructure reextract(const Mat& m, const AlignmentStructure& base);

// Set-valued objects compared by the stability theorems.
struct IncidenceSignature {
  IndexSets active;
  std::vector<std::pair<Index, Index>> pair_graph;
  Eigen::MatrixXi mask;
  IndexSet hubs;
  bool operator==(const IncidenceSignature& o) const;
};

IncidenceSignature incidence_signature(const Mat& m, const AlignmentStructure& s);

// ICM anatomy.
struct IcmThresholds {
  std::vector<Index> q;  // single entry broadcasts
  double tau_st = 0.0;
  double tau_sa = 0.0;
};

struct IcmGroup {
  IndexSet sc;
  IndexSet st;
  IndexSet sa;
  IndexSet srs;
  std::string srs_tag;
  Vec row_energy;  // aligned with the group's rows
  Vec profile;     // u_i
  double gamma_sc = kInf;
  double gamma_st = kInf;
  double gamma_sa = kInf;
  double gamma_prof = 0.0;
  double min_row_norm = 0.0;  // smallest nonzero core row norm
};

struct IcmAnatomy {
  std::vector<IcmGroup> groups;
  IndexSet hubs;
  IndexSet noise_rows;
  double noise_frob = 0.0;
  Index noise_entries = 0;
  std::string srs_tag;
};

IcmAnatomy icm_extract(const CoreOverlapNoise& con, const AlignmentStructure& s,
                       const IcmThresholds& th, const std::string& srs_tag);

struct IcmStability {
  double delta_row = 0.0;
  double delta_corr = 0.0;
  std::vector<bool> sc_ok;
  std::vector<bool> st_ok;
  std::vector<bool> sa_ok;
  bool stable = false;
};

IcmStability icm_stability(const IcmAnatomy& a, double delta_row, double delta_corr);

// Row-energy and profile-correlation shifts induced by a core perturbation of
// Frobenius size eta.
struct IcmDeltas {
  double delta_row = 0.0;
  double delta_corr = 0.0;
};
IcmDeltas icm_deltas(const IcmAnatomy& a, double eta);

}  // namespace gsacert

#endif  // GSACERT_ALIGNMENT_H_
