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

#include "gsacert/block_energy.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsacert/errors.h"
#include "gsacert/transport.h"

namespace gsacert {
namespace {

constexpr double kRelTol = 1e-12;

bool leq(double a, double b) { return a <= b + kRelTol * std::max(std::abs(a), std::abs(b)); }

void check_sets(const IndexSets& sets, Index limit, const char* what) {
  for (const auto& s : sets) {
    if (s.empty()) fail(ErrorKind::kInput, std::string(what) + ": empty index set");
    for (Index v : s) {
      if (v < 0 || v >= limit) {
        fail(ErrorKind::kDimension, std::string(what) + ": index " + std::to_string(v) +
                                        " outside [0," + std::to_string(limit) + ")");
      }
    }
  }
}

bool pairwise_disjoint(const IndexSets& sets, Index limit) {
  std::vector<bool> seen(limit, false);
  for (const auto& s : sets) {
    for (Index v : s) {
      if (seen[v]) return false;
      seen[v] = true;
    }
  }
  return true;
}

double block_sq(const Mat& a, const IndexSet& rows, const IndexSet& cols) {
  double acc = 0.0;
  for (Index r : rows)
    for (Index c : cols) acc += a(r, c) * a(r, c);
  return acc;
}

double row_sq(const Mat& a, const IndexSet& rows) {
  double acc = 0.0;
  for (Index r : rows) acc += a.row(r).squaredNorm();
  return acc;
}

// Rectangular block energies; rows with zero energy give zero rows.
void energies(const Mat& a, const IndexSets& rows, const IndexSets& cols, Mat& sq, Vec& e,
              Mat& norm) {
  sq.resize(rows.size(), cols.size());
  e.resize(rows.size());
  norm.resize(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    e(i) = row_sq(a, rows[i]);
    for (size_t j = 0; j < cols.size(); ++j) {
      sq(i, j) = block_sq(a, rows[i], cols[j]);
      norm(i, j) = e(i) > 0 ? sq(i, j) / e(i) : 0.0;
    }
  }
}

Mat sub(const Mat& m, const IndexSet& rows, const IndexSet& cols) {
  Mat out(rows.size(), cols.size());
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

}  // namespace

BlockEnergyMatrix block_energy(const Mat& a, const IndexSets& row_groups,
                               const IndexSets& col_sets) {
  if (row_groups.size() != col_sets.size()) {
    fail(ErrorKind::kDimension, "block_energy: " + std::to_string(row_groups.size()) +
                                    " row groups but " + std::to_string(col_sets.size()) +
                                    " column sets");
  }
  check_sets(row_groups, a.rows(), "block_energy rows");
  check_sets(col_sets, a.cols(), "block_energy columns");
  if (!pairwise_disjoint(row_groups, a.rows())) fail(ErrorKind::kInput, "block_energy: row groups overlap");
  BlockEnergyMatrix out;
  energies(a, row_groups, col_sets, out.block_sq, out.row_energy, out.e);
  const Index k = row_groups.size();
  for (Index i = 0; i < k; ++i) {
    out.zero_row.push_back(!(out.row_energy(i) > 0));
    for (Index j = 0; j < k; ++j) (i == j ? out.diag_mass : out.off_mass) += out.e(i, j);
  }
  if (k > 0) {
    out.diag_mass /= k;
    out.off_mass /= k;
  }
  return out;
}

bool is_bad(const AcceptedGraph& accepted, Index i, Index j) {
  if (i == j) return false;
  if (i >= static_cast<Index>(accepted.size())) return true;
  const auto& n = accepted[i];
  return std::find(n.begin(), n.end(), j) == n.end();
}

double bad_mass_normalized(const BlockEnergyMatrix& e, const AcceptedGraph& accepted) {
  double acc = 0.0;
  for (Index i = 0; i < e.size(); ++i)
    for (Index j = 0; j < e.size(); ++j)
      if (is_bad(accepted, i, j)) acc += e.e(i, j);
  return acc;
}

BadMassReport bad_mass(const Mat& a, const IndexSets& row_groups, const IndexSets& col_sets,
                       const AcceptedGraph& accepted) {
  const BlockEnergyMatrix be = block_energy(a, row_groups, col_sets);
  const Index k = be.size();
  BadMassReport r;
  r.per_row_normalized = Vec::Zero(k);
  r.per_row_unnormalized = Vec::Zero(k);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(a.rows(), a.cols(), false);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (!is_bad(accepted, i, j)) continue;
      r.per_row_normalized(i) += be.e(i, j);
      r.per_row_unnormalized(i) += be.block_sq(i, j);
      for (Index row : row_groups[i])
        for (Index c : col_sets[j]) mask(row, c) = true;
    }
  }
  r.visible = Mat::Zero(a.rows(), a.cols());
  for (Index row = 0; row < a.rows(); ++row)
    for (Index c = 0; c < a.cols(); ++c)
      if (mask(row, c)) r.visible(row, c) = a(row, c);
  r.normalized = r.per_row_normalized.sum();
  r.unnormalized = r.per_row_unnormalized.sum();
  r.visible_frob_sq = r.visible.squaredNorm();
  r.e_max = k ? be.row_energy.maxCoeff() : 0.0;
  r.bound_rhs = k * r.e_max * r.normalized;
  r.chain_holds = leq(r.visible_frob_sq, r.unnormalized) && leq(r.unnormalized, r.bound_rhs);
  return r;
}

ScreenReport margin_screen(const BlockEnergyMatrix& e, const std::vector<PairMargin>& pairs) {
  ScreenReport r;
  for (const auto& p : pairs) {
    if (!p.nondegenerate) {
      fail(ErrorKind::kDegenerate, "margin_screen: pair (" + std::to_string(p.i + 1) + "," +
                                       std::to_string(p.j + 1) + ") has zero core margin");
    }
    if (p.i >= e.size() || p.j >= e.size()) fail(ErrorKind::kDimension, "margin_screen: pair outside block matrix");
    ScreenPair s;
    s.i = p.i;
    s.j = p.j;
    s.m = p.m;
    s.numerator = e.row_energy(p.i) * e.e(p.i, p.j) + e.row_energy(p.j) * e.e(p.j, p.i);
    s.h = 3.0 * std::sqrt(s.numerator) / p.m;
    s.slack = p.m * p.m / 9.0 - s.numerator;
    s.certified = s.h < 1.0;
    r.h_max = std::max(r.h_max, s.h);
    r.all_certified = r.all_certified && s.certified;
    r.pairs.push_back(s);
  }
  r.zeta = 1.0 - r.h_max;
  return r;
}

double block_energy_perturbation_bound(double s, double delta, double e_min) {
  const double num = (2.0 * s + delta) * delta;
  return num / e_min + s * s * num / (e_min * e_min);
}

PerturbReport perturb_bound(const Mat& a, const Mat& b, const IndexSets& row_groups,
                            const IndexSets& col_sets, double e_min, double s, double delta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::kDimension, "perturb_bound: shape mismatch");
  if (!(e_min > 0)) fail(ErrorKind::kInput, "perturb_bound: e_min must be positive");
  const BlockEnergyMatrix ea = block_energy(a, row_groups, col_sets);
  const BlockEnergyMatrix eb = block_energy(b, row_groups, col_sets);
  for (Index i = 0; i < ea.size(); ++i) {
    if (ea.row_energy(i) < e_min || eb.row_energy(i) < e_min) {
      fail(ErrorKind::kRange, "perturb_bound: row energy of group " + std::to_string(i + 1) +
                                  " below e_min");
    }
  }
  PerturbReport r;
  r.delta = delta < 0 ? (a - b).norm() : delta;
  r.s = s > 0 ? s : std::max(a.norm(), b.norm());
  r.e_min = e_min;
  r.bound = block_energy_perturbation_bound(r.s, r.delta, e_min);
  r.max_diff = ea.size() ? (ea.e - eb.e).cwiseAbs().maxCoeff() : 0.0;
  r.holds = leq(r.max_diff, r.bound);
  return r;
}

WindowRobustness window_robustness(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, Index r,
                                   Index r_alt, const IndexSets& row_groups,
                                   const IndexSets& col_sets) {
  WindowRobustness w;
  w.r = r;
  w.r_alt = r_alt;
  const Mat a = padded_truncated_transport(svd_k, svd_k1, r, r);
  const Mat b = padded_truncated_transport(svd_k, svd_k1, r_alt, r_alt);
  w.delta_bound = truncation_bound(svd_k, svd_k1, r, r) + truncation_bound(svd_k, svd_k1, r_alt, r_alt);
  w.delta_measured = (a - b).norm();
  const BlockEnergyMatrix ea = block_energy(a, row_groups, col_sets);
  const BlockEnergyMatrix eb = block_energy(b, row_groups, col_sets);
  double e_min = kInf;
  for (Index i = 0; i < ea.size(); ++i)
    e_min = std::min({e_min, ea.row_energy(i), eb.row_energy(i)});
  if (!(e_min > 0) || !std::isfinite(e_min)) {
    fail(ErrorKind::kDegenerate, "window_robustness: a row group carries no energy");
  }
  const double delta = std::max(w.delta_bound, w.delta_measured);
  w.check = perturb_bound(a, b, row_groups, col_sets, e_min, 0.0, delta);
  return w;
}

ScaleTransferReport scale_transfer(const Mat& a, const Vec& d_r, const Vec& d_c,
                                   const IndexSets& row_groups, const IndexSets& col_sets,
                                   const AcceptedGraph& accepted) {
  if (d_r.size() != a.rows() || d_c.size() != a.cols()) fail(ErrorKind::kDimension, "scale_transfer: weight length mismatch");
  if (!(d_r.minCoeff() > 0) || !(d_c.minCoeff() > 0)) fail(ErrorKind::kInput, "scale_transfer: nonpositive weight");
  const Mat b = d_r.asDiagonal() * a * d_c.asDiagonal();
  const BlockEnergyMatrix ea = block_energy(a, row_groups, col_sets);
  const BlockEnergyMatrix eb = block_energy(b, row_groups, col_sets);
  ScaleTransferReport r;
  const double ratio = (d_r.maxCoeff() * d_c.maxCoeff()) / (d_r.minCoeff() * d_c.minCoeff());
  r.theta = ratio * ratio;
  r.sandwich_holds = true;
  r.zero_support_preserved = true;
  for (Index i = 0; i < ea.size(); ++i) {
    for (Index j = 0; j < ea.size(); ++j) {
      if ((ea.block_sq(i, j) == 0) != (eb.block_sq(i, j) == 0)) r.zero_support_preserved = false;
      if (ea.zero_row[i] || eb.zero_row[i]) continue;
      if (!leq(eb.e(i, j), r.theta * ea.e(i, j)) || !leq(ea.e(i, j), r.theta * eb.e(i, j))) {
        r.sandwich_holds = false;
      }
    }
  }
  r.bad_a = bad_mass_normalized(ea, accepted);
  r.bad_b = bad_mass_normalized(eb, accepted);
  r.bad_transfer_holds = leq(r.bad_b, r.theta * r.bad_a);
  return r;
}

LeakageReport row_leakage(const Mat& a, const Mat& l, const IndexSets& row_groups,
                          const IndexSets& col_bins, const AcceptedGraph& accepted) {
  if (l.rows() != a.rows() || l.cols() != a.rows()) fail(ErrorKind::kDimension, "row_leakage: L must be square over the rows of A");
  if (row_groups.size() != col_bins.size()) fail(ErrorKind::kDimension, "row_leakage: one column bin per row group required");
  check_sets(row_groups, a.rows(), "row_leakage rows");
  check_sets(col_bins, a.cols(), "row_leakage columns");
  if (!pairwise_disjoint(row_groups, a.rows())) fail(ErrorKind::kInput, "row_leakage: row groups overlap");
  IndexSets blocks = row_groups;
  {
    std::vector<bool> covered(a.rows(), false);
    for (const auto& g : row_groups)
      for (Index r : g) covered[r] = true;
    IndexSet rest;
    for (Index r = 0; r < a.rows(); ++r)
      if (!covered[r]) rest.push_back(r);
    if (!rest.empty()) blocks.push_back(rest);
  }
  const Mat b = l * a;
  const double a_frob = a.norm();
  LeakageReport rep;
  const Index k = row_groups.size();
  for (Index i = 0; i < k; ++i) {
    LeakageRow row;
    std::vector<Index> mult(a.cols(), 0);
    for (Index j = 0; j < k; ++j) {
      if (!is_bad(accepted, i, j)) continue;
      row.bad_a += block_sq(a, row_groups[i], col_bins[j]);
      row.bad_b += block_sq(b, row_groups[i], col_bins[j]);
      for (Index c : col_bins[j]) row.multiplicity = std::max(row.multiplicity, ++mult[c]);
    }
    row.ell_ii = op_norm(sub(l, row_groups[i], row_groups[i]));
    for (size_t blk = 0; blk < blocks.size(); ++blk)
      if (static_cast<Index>(blk) != i) row.ell_off += op_norm(sub(l, row_groups[i], blocks[blk]));
    row.bound = row.ell_ii * std::sqrt(row.bad_a) +
                std::sqrt(static_cast<double>(row.multiplicity)) * row.ell_off * a_frob;
    row.holds = leq(std::sqrt(row.bad_b), row.bound);
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

CoarseningReport coarsen(const Mat& a, const IndexSets& row_groups, const IndexSets& col_bins,
                         const std::vector<Index>& pi_r, const std::vector<Index>& pi_c,
                         const AcceptedGraph& accepted) {
  const Index k = row_groups.size();
  if (static_cast<Index>(col_bins.size()) != k || static_cast<Index>(pi_r.size()) != k ||
      static_cast<Index>(pi_c.size()) != k) {
    fail(ErrorKind::kDimension, "coarsen: maps and bins must cover all fine groups");
  }
  check_sets(row_groups, a.rows(), "coarsen rows");
  check_sets(col_bins, a.cols(), "coarsen columns");
  if (!pairwise_disjoint(row_groups, a.rows())) fail(ErrorKind::kInput, "coarsen: overlapping fine row groups");
  if (!pairwise_disjoint(col_bins, a.cols())) fail(ErrorKind::kInput, "coarsen: overlapping fine bins");
  auto coarse_count = [&](const std::vector<Index>& pi, const char* which) {
    Index kb = 0;
    for (Index v : pi) {
      if (v < 0) fail(ErrorKind::kInput, std::string("coarsen: negative ") + which + " label");
      kb = std::max(kb, v + 1);
    }
    std::vector<bool> hit(kb, false);
    for (Index v : pi) hit[v] = true;
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
      fail(ErrorKind::kInput, std::string("coarsen: ") + which + " map is not surjective");
    }
    return kb;
  };
  const Index kr = coarse_count(pi_r, "row"), kc = coarse_count(pi_c, "column");

  Mat fine_sq, fine_e;
  Vec e;
  energies(a, row_groups, col_bins, fine_sq, e, fine_e);
  for (Index i = 0; i < k; ++i) {
    if (!(e(i) > 0)) fail(ErrorKind::kDegenerate, "coarsen: fine row group " + std::to_string(i + 1) + " has zero energy");
  }

  CoarseningReport r;
  r.coarse = Mat::Zero(kr, kc);
  Vec coarse_e = Vec::Zero(kr);
  for (Index i = 0; i < k; ++i) {
    coarse_e(pi_r[i]) += e(i);
    for (Index j = 0; j < k; ++j) r.coarse(pi_r[i], pi_c[j]) += e(i) * fine_e(i, j);
  }
  for (Index ab = 0; ab < kr; ++ab) r.coarse.row(ab) /= coarse_e(ab);

  IndexSets coarse_rows(kr), coarse_cols(kc);
  for (Index i = 0; i < k; ++i) {
    coarse_rows[pi_r[i]].insert(coarse_rows[pi_r[i]].end(), row_groups[i].begin(), row_groups[i].end());
    coarse_cols[pi_c[i]].insert(coarse_cols[pi_c[i]].end(), col_bins[i].begin(), col_bins[i].end());
  }
  for (auto& s : coarse_rows) std::sort(s.begin(), s.end());
  for (auto& s : coarse_cols) std::sort(s.begin(), s.end());
  Mat direct_sq;
  Vec direct_e;
  energies(a, coarse_rows, coarse_cols, direct_sq, direct_e, r.direct);
  r.max_formula_error = (r.coarse - r.direct).cwiseAbs().maxCoeff();

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ok =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(kr, kc, false);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (is_bad(accepted, i, j)) {
        r.fine_bad_unnormalized += fine_sq(i, j);
        r.fine_bad_normalized += fine_e(i, j);
      } else {
        ok(pi_r[i], pi_c[j]) = true;
      }
    }
  }
  r.coarse_accepted.resize(kr);
  for (Index ab = 0; ab < kr; ++ab) {
    for (Index b = 0; b < kc; ++b) {
      if (ok(ab, b)) {
        r.coarse_accepted[ab].push_back(b);
      } else {
        r.coarse_bad_unnormalized += direct_sq(ab, b);
      }
    }
  }
  r.e_max = e.maxCoeff();
  r.k1 = r.fine_bad_unnormalized > 0 || r.coarse_bad_unnormalized == 0;
  r.k2 = leq(r.coarse_bad_unnormalized, r.fine_bad_unnormalized);
  r.k3 = leq(r.coarse_bad_unnormalized, k * r.e_max * r.fine_bad_normalized);
  return r;
}

}  // namespace gsacert
