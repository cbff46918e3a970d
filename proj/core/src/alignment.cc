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

#include "gsacert/alignment.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

Mat submatrix(const Mat& m, const IndexSet& rows, const IndexSet& cols) {
  Mat out(rows.size(), cols.size());
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_and(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_or(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Indices ordered by decreasing score, then increasing index.
std::vector<Index> rank_by_score(const Vec& score) {
  std::vector<Index> order(score.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return score(a) > score(b); });
  return order;
}

template <typename T>
T broadcast(const std::vector<T>& v, size_t i, const char* what) {
  if (v.size() == 1) return v[0];
  if (i >= v.size()) fail(ErrorKind::kConfig, std::string(what) + ": one value per group required");
  return v[i];
}

// Both margins are decided on the exact sign of m - 3o so that ties at the
// boundary never split the two forms.
bool one_third(double m, double o) { return m > 0 && std::fma(-3.0, o, m) > 0; }

bool half_gap(double m, double o) {
  if (!(m > 0)) return false;
  // m - o = s + e exactly (two-sum); near the boundary s - 2o is exact.
  const double s = m - o;
  const double bb = s - m;
  const double e = (m - (s - bb)) + (-o - bb);
  return (s - 2.0 * o) + e > 0;
}

}  // namespace

RowPartition mode_profile_partition(const Mat& y, double theta, double mu) {
  if (y.rows() == 0 || y.cols() == 0) fail(ErrorKind::kInput, "mode_profile_partition: empty profile");
  if (!all_finite(y)) fail(ErrorKind::kInput, "mode_profile_partition: non-finite profile");
  const Index n = y.rows(), r = y.cols();
  RowPartition p;
  p.theta = theta;
  p.mu = mu;
  p.entry_bound = y.cwiseAbs().maxCoeff();
  p.group_of_row.assign(n, -1);
  p.winner_score = Vec::Zero(n);
  p.runner_up = Vec::Zero(n);
  p.threshold_margin = Vec::Zero(n);
  p.gap_margin = Vec::Zero(n);
  std::vector<Index> winner(n, -1);
  for (Index row = 0; row < n; ++row) {
    Index best = 0;
    for (Index a = 1; a < r; ++a)
      if (y(row, a) * y(row, a) > y(row, best) * y(row, best)) best = a;
    const double w = y(row, best) * y(row, best);
    double second = 0.0;
    for (Index a = 0; a < r; ++a)
      if (a != best) second = std::max(second, y(row, a) * y(row, a));
    p.winner_score(row) = w;
    p.runner_up(row) = second;
    p.threshold_margin(row) = w - theta;
    p.gap_margin(row) = w - second;
    if (w >= theta && w - second >= mu) winner[row] = best;
  }
  for (Index a = 0; a < r; ++a) {
    IndexSet rows;
    for (Index row = 0; row < n; ++row)
      if (winner[row] == a) rows.push_back(row);
    if (rows.empty()) continue;
    for (Index row : rows) p.group_of_row[row] = static_cast<int>(p.groups.size());
    p.groups.push_back(std::move(rows));
    p.mode_of_group.push_back(a);
  }
  for (Index row = 0; row < n; ++row)
    if (winner[row] < 0) p.unassigned.push_back(row);
  return p;
}

RowPartition partition_from_labels(const std::vector<int>& labels) {
  if (labels.empty()) fail(ErrorKind::kInput, "partition: no rows");
  std::map<int, IndexSet> by_id;
  RowPartition p;
  p.group_of_row.assign(labels.size(), -1);
  for (size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0) fail(ErrorKind::kInput, "partition: negative group id at row " + std::to_string(r));
    if (labels[r] == 0) {
      p.unassigned.push_back(r);
    } else {
      by_id[labels[r]].push_back(r);
    }
  }
  for (auto& [id, rows] : by_id) {
    for (Index row : rows) p.group_of_row[row] = static_cast<int>(p.groups.size());
    p.groups.push_back(std::move(rows));
  }
  return p;
}

bool row_assignment_stable(const RowPartition& p, Index r, double delta) {
  if (p.winner_score.size() != p.rows()) return false;
  const double b = delta * (2.0 * p.entry_bound + delta);
  const double w = p.winner_score(r), gap = p.gap_margin(r);
  if (p.group_of_row[r] >= 0) {
    return w - p.theta > b && gap - p.mu > 2.0 * b && gap > 2.0 * b;
  }
  return p.theta - w > b || p.mu - gap > 2.0 * b;
}

bool partition_stable(const RowPartition& p, double delta) {
  for (Index r = 0; r < p.rows(); ++r)
    if (!row_assignment_stable(p, r, delta)) return false;
  return true;
}

ActiveSets active_columns(const Mat& m, const RowPartition& rows, const SupportRule& rule) {
  const Index n = m.cols();
  if (rows.rows() != m.rows()) {
    fail(ErrorKind::kDimension, "active_columns: partition covers " + std::to_string(rows.rows()) +
                                    " rows, matrix has " + std::to_string(m.rows()));
  }
  if (rule.sizes.empty() == rule.fractions.empty()) {
    fail(ErrorKind::kConfig, "active_columns: give either support sizes or energy fractions");
  }
  ActiveSets out;
  for (size_t i = 0; i < rows.groups.size(); ++i) {
    Vec q = Vec::Zero(n);
    for (Index r : rows.groups[i]) q += m.row(r).transpose().cwiseAbs2();
    const auto order = rank_by_score(q);
    Index s = 0;
    if (!rule.sizes.empty()) {
      s = broadcast(rule.sizes, i, "support sizes");
      if (s < 1 || s > n) {
        fail(ErrorKind::kRange, "active_columns: support size " + std::to_string(s) +
                                    " outside [1," + std::to_string(n) + "]");
      }
    } else {
      const double tau = broadcast(rule.fractions, i, "energy fractions");
      if (!(tau > 0 && tau <= 1)) fail(ErrorKind::kInput, "active_columns: energy fraction must lie in (0,1]");
      const double need = tau * q.sum();
      double cum = 0.0;
      s = n;
      for (Index k = 0; k < n; ++k) {
        cum += q(order[k]);
        if (cum >= need) {
          s = k + 1;
          break;
        }
      }
    }
    IndexSet set(order.begin(), order.begin() + s);
    std::sort(set.begin(), set.end());
    out.sets.push_back(std::move(set));
    out.size.push_back(s);
    out.gap.push_back(s == n ? kInf : q(order[s - 1]) - q(order[s]));
    out.score.push_back(std::move(q));
  }
  return out;
}

AlignmentStructure extract_structure(const Mat& m, const RowPartition& rows,
                                     const SupportRule& rule) {
  AlignmentStructure s;
  s.rows = rows;
  s.active = active_columns(m, rows, rule);
  s.cols = m.cols();
  for (const auto& g : rows.groups) s.row_perm.insert(s.row_perm.end(), g.begin(), g.end());
  s.row_perm.insert(s.row_perm.end(), rows.unassigned.begin(), rows.unassigned.end());
  std::vector<bool> placed(m.cols(), false);
  for (const auto& c : s.active.sets) {
    for (Index col : c) {
      if (!placed[col]) s.col_perm.push_back(col);
      placed[col] = true;
    }
  }
  for (Index col = 0; col < m.cols(); ++col)
    if (!placed[col]) s.col_perm.push_back(col);
  return s;
}

double sigma_min_plus(const Mat& block) {
  if (block.size() == 0) return 0.0;
  const Vec sv = singular_values(block);
  if (sv.size() == 0 || !(sv(0) > 0)) return 0.0;
  const double cut = kPositiveSigmaCutoff * sv(0);
  double best = sv(0);
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) best = sv(k);
  return best;
}

std::vector<PairMargin> pairwise_margins(const Mat& m, const AlignmentStructure& s) {
  std::vector<PairMargin> out;
  const auto& g = s.rows.groups;
  const auto& c = s.active.sets;
  for (size_t i = 0; i < g.size(); ++i) {
    for (size_t j = i + 1; j < g.size(); ++j) {
      PairMargin p;
      p.i = i;
      p.j = j;
      p.core_ij = sigma_min_plus(submatrix(m, g[i], set_minus(c[i], c[j])));
      p.core_ji = sigma_min_plus(submatrix(m, g[j], set_minus(c[j], c[i])));
      const IndexSet shared = set_and(c[i], c[j]);
      p.shares_support = !shared.empty();
      const Mat ov = submatrix(m, set_or(g[i], g[j]), shared);
      p.m = std::min(p.core_ij, p.core_ji);
      p.o = ov.size() ? op_norm(ov) : 0.0;
      p.overlap_frob = ov.norm();
      p.delta_sigma = p.m - p.o;
      if (p.overlap_frob > 0) p.gamma = p.o / p.overlap_frob;
      p.nondegenerate = p.m > 0;
      p.one_third_holds = one_third(p.m, p.o);
      p.half_gap_holds = half_gap(p.m, p.o);
      p.frobenius_holds = p.nondegenerate && 3.0 * p.overlap_frob < p.m;
      p.slack = p.m - 3.0 * p.o;
      out.push_back(p);
    }
  }
  return out;
}

CoreOverlapNoise decompose(const Mat& m, const AlignmentStructure& s) {
  const auto& g = s.rows.groups;
  const auto& c = s.active.sets;
  CoreOverlapNoise d;
  d.mask = Eigen::MatrixXi::Zero(m.rows(), m.cols());
  for (size_t i = 0; i < g.size(); ++i) {
    IndexSet others;
    for (size_t j = 0; j < g.size(); ++j)
      if (j != i) others = set_or(others, c[j]);
    d.dedicated.push_back(set_minus(c[i], others));
    d.shared.push_back(set_and(c[i], others));
    for (Index r : g[i]) {
      for (Index col : d.dedicated.back()) d.mask(r, col) = static_cast<int>(MaskLabel::kCore);
      for (Index col : d.shared.back()) d.mask(r, col) = static_cast<int>(MaskLabel::kOverlap);
    }
  }
  d.core = Mat::Zero(m.rows(), m.cols());
  d.overlap = Mat::Zero(m.rows(), m.cols());
  d.noise = Mat::Zero(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index col = 0; col < m.cols(); ++col) {
      switch (static_cast<MaskLabel>(d.mask(r, col))) {
        case MaskLabel::kCore: d.core(r, col) = m(r, col); break;
        case MaskLabel::kOverlap: d.overlap(r, col) = m(r, col); break;
        case MaskLabel::kNoise: d.noise(r, col) = m(r, col); break;
      }
    }
  }
  d.core_frob = d.core.norm();
  d.overlap_frob = d.overlap.norm();
  d.noise_frob = d.noise.norm();
  d.total_frob = m.norm();
  return d;
}

Incidence incidence(const AlignmentStructure& s, const Mat& m) {
  const auto& g = s.rows.groups;
  const auto& c = s.active.sets;
  Incidence inc;
  inc.degree.assign(s.cols, 0);
  std::vector<IndexSet> groups_of(s.cols);
  for (size_t i = 0; i < c.size(); ++i) {
    for (Index col : c[i]) {
      inc.edges.emplace_back(i, col);
      ++inc.degree[col];
      groups_of[col].push_back(i);
    }
  }
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = i + 1; j < c.size(); ++j)
      if (!set_and(c[i], c[j]).empty()) inc.shared.emplace_back(i, j);
  for (Index col = 0; col < s.cols; ++col) {
    if (inc.degree[col] < 2) continue;
    inc.hubs.push_back(col);
    HubInfo h;
    h.column = col;
    h.groups = groups_of[col];
    h.min_segment = kInf;
    for (Index i : h.groups) {
      double seg = 0.0;
      for (Index r : g[i]) seg += m(r, col) * m(r, col);
      h.energy += seg;
      h.min_segment = std::min(h.min_segment, std::sqrt(seg));
    }
    h.bound = std::sqrt(h.energy / static_cast<double>(h.groups.size()));
    h.bound_holds = h.min_segment <= h.bound * (1.0 + 1e-12);
    inc.hub_info.push_back(h);
  }
  return inc;
}

double gap_radius(double frob, double gap) {
  if (!(gap > 0)) return 0.0;
  if (!std::isfinite(gap)) return kInf;
  // -F + sqrt(F^2 + gap/2) without cancellation.
  return 0.5 * gap / (frob + std::sqrt(frob * frob + 0.5 * gap));
}

double pair_radius(double m, double o) { return (m - 3.0 * o) / 4.0; }

CertificateRadius certificate_radius(const Mat& m, const AlignmentStructure& s,
                                     const std::vector<PairMargin>& pairs) {
  CertificateRadius out;
  const double f = m.norm();
  out.margins_positive = true;
  double best = kInf;
  for (double gap : s.active.gap) {
    const double r = gap_radius(f, gap);
    if (!(gap > 0)) out.margins_positive = false;
    out.r_gamma.push_back(r);
    best = std::min(best, r);
  }
  for (const auto& p : pairs) {
    if (!p.nondegenerate) continue;
    const double r = pair_radius(p.m, p.o);
    if (!(r > 0)) out.margins_positive = false;
    out.r_pair.push_back({p.i, p.j, r});
    best = std::min(best, r);
  }
  out.r_cert = out.margins_positive ? best : 0.0;
  return out;
}

StabilityVerdict stability_check(const Mat& m, const AlignmentStructure& s,
                                 const std::vector<PairMargin>& pairs, double eta) {
  if (!(eta >= 0)) fail(ErrorKind::kInput, "stability_check: eta must be nonnegative");
  StabilityVerdict v;
  v.eta = eta;
  const double f = m.norm();
  v.omega = 2.0 * f * eta + eta * eta;
  v.gaps_ok = true;
  for (double gap : s.active.gap)
    if (!(gap > 2.0 * v.omega)) v.gaps_ok = false;
  v.pairs_ok = true;
  for (const auto& p : pairs)
    if (p.nondegenerate && !(3.0 * p.o + 4.0 * eta < p.m)) v.pairs_ok = false;
  v.certified = v.gaps_ok && v.pairs_ok;
  return v;
}

AlignmentStructure reextract(const Mat& m, const AlignmentStructure& base) {
  SupportRule rule;
  rule.sizes = base.active.size;
  if (rule.sizes.empty()) rule.sizes.push_back(1);
  if (base.rows.groups.empty()) {
    AlignmentStructure s = base;
    s.active = ActiveSets{};
    return s;
  }
  return extract_structure(m, base.rows, rule);
}

bool IncidenceSignature::operator==(const IncidenceSignature& o) const {
  return active == o.active && pair_graph == o.pair_graph && hubs == o.hubs &&
         mask.rows() == o.mask.rows() && mask.cols() == o.mask.cols() && mask == o.mask;
}

IncidenceSignature incidence_signature(const Mat& m, const AlignmentStructure& s) {
  IncidenceSignature sig;
  sig.active = s.active.sets;
  const Incidence inc = incidence(s, m);
  sig.pair_graph = inc.shared;
  sig.hubs = inc.hubs;
  sig.mask = decompose(m, s).mask;
  return sig;
}

IcmAnatomy icm_extract(const CoreOverlapNoise& con, const AlignmentStructure& s,
                       const IcmThresholds& th, const std::string& srs_tag) {
  IcmAnatomy a;
  a.srs_tag = srs_tag;
  const auto& g = s.rows.groups;
  for (size_t i = 0; i < g.size(); ++i) {
    IcmGroup grp;
    grp.srs = s.active.sets[i];
    grp.srs_tag = srs_tag;
    const Index n = g[i].size();
    const Index q = broadcast(th.q, i, "ICM q");
    if (q < 1 || q > n) {
      fail(ErrorKind::kRange, "icm_extract: q=" + std::to_string(q) + " for a group of " +
                                  std::to_string(n) + " rows");
    }
    Mat block(n, con.core.cols());
    for (Index k = 0; k < n; ++k) block.row(k) = con.core.row(g[i][k]);
    grp.row_energy = block.rowwise().squaredNorm();
    const auto order = rank_by_score(grp.row_energy);
    std::vector<bool> in_sc(n, false);
    for (Index k = 0; k < q; ++k) {
      in_sc[order[k]] = true;
      grp.sc.push_back(g[i][order[k]]);
    }
    std::sort(grp.sc.begin(), grp.sc.end());
    grp.gamma_sc = q == n ? kInf : grp.row_energy(order[q - 1]) - grp.row_energy(order[q]);
    for (Index k = 0; k < n; ++k) {
      if (in_sc[k]) continue;
      const double e = grp.row_energy(k);
      if (e >= th.tau_st) grp.st.push_back(g[i][k]);
      grp.gamma_st = std::min(grp.gamma_st, std::abs(e - th.tau_st));
    }

    Eigen::JacobiSVD<Mat> svd(block, Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    grp.profile = Vec::Zero(block.cols());
    grp.min_row_norm = kInf;
    if (sv.size() > 0 && sv(0) > 0) {
      Mat u = svd.matrixV().leftCols(1);
      fix_column_signs(u, nullptr);
      grp.profile = u.col(0);
      grp.gamma_prof = sv(0) - (sv.size() > 1 ? sv(1) : 0.0);
      for (Index k = 0; k < n; ++k) {
        const double norm = std::sqrt(grp.row_energy(k));
        if (!(norm > 0)) continue;
        grp.min_row_norm = std::min(grp.min_row_norm, norm);
        const double corr = std::abs(block.row(k).dot(grp.profile)) / norm;
        if (corr >= th.tau_sa) grp.sa.push_back(g[i][k]);
        grp.gamma_sa = std::min(grp.gamma_sa, std::abs(corr - th.tau_sa));
      }
    }
    if (!std::isfinite(grp.min_row_norm)) grp.min_row_norm = 0.0;
    a.groups.push_back(std::move(grp));
  }
  a.hubs = incidence(s, con.core + con.overlap + con.noise).hubs;
  a.noise_rows = s.rows.unassigned;
  a.noise_frob = con.noise_frob;
  a.noise_entries = (con.noise.array() != 0.0).count();
  return a;
}

IcmStability icm_stability(const IcmAnatomy& a, double delta_row, double delta_corr) {
  IcmStability st;
  st.delta_row = delta_row;
  st.delta_corr = delta_corr;
  st.stable = true;
  for (const auto& g : a.groups) {
    st.sc_ok.push_back(2.0 * delta_row < g.gamma_sc);
    st.st_ok.push_back(delta_row < g.gamma_st);
    st.sa_ok.push_back(delta_corr < g.gamma_sa);
    st.stable = st.stable && st.sc_ok.back() && st.st_ok.back() && st.sa_ok.back();
  }
  return st;
}

IcmDeltas icm_deltas(const IcmAnatomy& a, double eta) {
  IcmDeltas d;
  if (eta == 0) return d;
  double e_max = 0.0, min_norm = kInf, gap = kInf;
  bool any_profile = false;
  for (const auto& g : a.groups) {
    if (g.row_energy.size()) e_max = std::max(e_max, g.row_energy.maxCoeff());
    if (g.min_row_norm > 0) {
      any_profile = true;
      min_norm = std::min(min_norm, g.min_row_norm);
      gap = std::min(gap, g.gamma_prof);
    }
  }
  d.delta_row = 2.0 * std::sqrt(e_max) * eta + eta * eta;
  if (!any_profile) return d;
  d.delta_corr = gap > eta ? 2.0 * eta / min_norm + std::sqrt(2.0) * eta / (gap - eta) : kInf;
  return d;
}

}  // namespace gsacert
