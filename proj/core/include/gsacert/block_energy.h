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

#ifndef GSACERT_BLOCK_ENERGY_H_
#define GSACERT_BLOCK_ENERGY_H_

#include <vector>

#include "gsacert/alignment.h"

namespace gsacert {

struct BlockEnergyMatrix {
  Mat e;            // K x K, rows normalized by e_i
  Vec row_energy;   // e_i = ||A[R_i,:]||_F^2
  Mat block_sq;     // unnormalized ||A[R_i,C_j]||_F^2
  std::vector<bool> zero_row;
  double off_mass = 0.0;
  double diag_mass = 0.0;
  Index size() const { return e.rows(); }
};

BlockEnergyMatrix block_energy(const Mat& a, const IndexSets& row_groups,
                               const IndexSets& col_sets);

// Accepted-overlap graph N_i; an empty list means diagonal-only acceptance.
using AcceptedGraph = std::vector<IndexSet>;

// True if block (i,j) is bad: j is neither i nor an accepted neighbour.
bool is_bad(const AcceptedGraph& accepted, Index i, Index j);

struct BadMassReport {
  double normalized = 0.0;    // Bad(E)
  double unnormalized = 0.0;  // Bad(A)
  double visible_frob_sq = 0.0;
  double bound_rhs = 0.0;  // K e_max Bad(E)
  double e_max = 0.0;
  bool chain_holds = false;
  Vec per_row_normalized;
  Vec per_row_unnormalized;
  Mat visible;  // A restricted to the union of bad blocks
};

BadMassReport bad_mass(const Mat& a, const IndexSets& row_groups, const IndexSets& col_sets,
                       const AcceptedGraph& accepted);
double bad_mass_normalized(const BlockEnergyMatrix& e, const AcceptedGraph& accepted);

struct ScreenPair {
  Index i = 0;
  Index j = 0;
  double numerator = 0.0;  // e_i E_ij + e_j E_ji
  double m = 0.0;
  double h = 0.0;
  double slack = 0.0;  // m^2/9 - numerator
  bool certified = false;
};

struct ScreenReport {
  std::vector<ScreenPair> pairs;
  double h_max = 0.0;
  double zeta = 1.0;
  bool all_certified = true;
};

ScreenReport margin_screen(const BlockEnergyMatrix& e, const std::vector<PairMargin>& pairs);

struct PerturbReport {
  double delta = 0.0;
  double s = 0.0;
  double e_min = 0.0;
  double bound = 0.0;
  double max_diff = 0.0;
  bool holds = false;
};

double block_energy_perturbation_bound(double s, double delta, double e_min);
// s <= 0 selects max(||A||_F, ||B||_F); delta < 0 selects ||A - B||_F.
PerturbReport perturb_bound(const Mat& a, const Mat& b, const IndexSets& row_groups,
                            const IndexSets& col_sets, double e_min, double s = 0.0,
                            double delta = -1.0);

struct WindowRobustness {
  Index r = 0;
  Index r_alt = 0;
  double delta_bound = 0.0;     // E_tr(R,R) + E_tr(R',R')
  double delta_measured = 0.0;  // ||A_R - A_R'||_F
  PerturbReport check;
};

WindowRobustness window_robustness(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, Index r,
                                   Index r_alt, const IndexSets& row_groups,
                                   const IndexSets& col_sets);

struct ScaleTransferReport {
  double theta = 1.0;
  bool sandwich_holds = false;
  bool bad_transfer_holds = false;
  bool zero_support_preserved = false;
  double bad_a = 0.0;
  double bad_b = 0.0;
};

ScaleTransferReport scale_transfer(const Mat& a, const Vec& d_r, const Vec& d_c,
                                   const IndexSets& row_groups, const IndexSets& col_sets,
                                   const AcceptedGraph& accepted);

struct LeakageRow {
  double bad_a = 0.0;
  double bad_b = 0.0;
  double ell_ii = 0.0;
  double ell_off = 0.0;
  Index multiplicity = 0;
  double bound = 0.0;  // bound on Bad_i(B)^{1/2}
  bool holds = false;
};

struct LeakageReport {
  std::vector<LeakageRow> rows;
  bool holds = true;
};

// Rows outside every group are treated as one more leakage block.
LeakageReport row_leakage(const Mat& a, const Mat& l, const IndexSets& row_groups,
                          const IndexSets& col_bins, const AcceptedGraph& accepted);

struct CoarseningReport {
  Mat coarse;          // formula value
  Mat direct;          // recomputed on the unions
  double max_formula_error = 0.0;
  AcceptedGraph coarse_accepted;
  double fine_bad_unnormalized = 0.0;
  double coarse_bad_unnormalized = 0.0;
  double fine_bad_normalized = 0.0;
  double e_max = 0.0;
  bool k1 = false;
  bool k2 = false;
  bool k3 = false;
};

CoarseningReport coarsen(const Mat& a, const IndexSets& row_groups, const IndexSets& col_bins,
                         const std::vector<Index>& pi_r, const std::vector<Index>& pi_c,
                         const AcceptedGraph& accepted);

}  // namespace gsacert

#endif  // GSACERT_BLOCK_ENERGY_H_
