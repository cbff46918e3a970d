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

#include "gsacert/certificate.h"

#include <algorithm>
#include <cmath>

#include "gsacert/errors.h"
#include "gsacert/parallel.h"

namespace gsacert {
namespace {

Mat pad_columns(const Mat& m, Index width) {
  Mat out = Mat::Zero(m.rows(), width);
  out.leftCols(m.cols()) = m;
  return out;
}

AlignmentStructure pad_structure(const AlignmentStructure& s, Index width) {
  AlignmentStructure p = s;
  for (Index c = s.cols; c < width; ++c) p.col_perm.push_back(c);
  p.cols = width;
  for (auto& q : p.active.score) {
    Vec w = Vec::Zero(width);
    w.head(q.size()) = q;
    q = w;
  }
  return p;
}

double pos(double x) { return x > 0 ? x : 0.0; }

Index ceil_fraction(double rho, Index d) {
  return static_cast<Index>(std::ceil(rho * static_cast<double>(d) - 1e-12));
}

RowPartition row_partition(const ProtocolConfig& cfg, const GaugedSvd& svd_k1, Index rt,
                           const TransportMatrix& t) {
  if (!cfg.partition.empty()) {
    if (static_cast<Index>(cfg.partition.size()) != t.entries.rows()) {
      fail(ErrorKind::kConfig, "partition lists " + std::to_string(cfg.partition.size()) +
                                   " rows but the transport has " +
                                   std::to_string(t.entries.rows()));
    }
    return partition_from_labels(cfg.partition);
  }
  Mat y;
  if (t.row_coords == RowCoords::kPhysicalOutput) {
    y = svd_k1.u.leftCols(rt) * svd_k1.sigma.head(rt).asDiagonal();
  } else {
    y = Mat(svd_k1.sigma.head(rt).asDiagonal());
  }
  return mode_profile_partition(y, cfg.theta_row, cfg.mu_row);
}

const char* srs_tag(const TransportMatrix& t) {
  return t.col_coords == ColCoords::kSourceMode ? "mode" : "chan";
}

void add(DomainVerdict& v, const std::string& domain, const std::string& name, double lhs,
         double rhs, bool measured, bool holds) {
  v.checks.push_back({domain, name, lhs, rhs, measured, measured && holds});
}

bool domain_ok(const DomainVerdict& v, const std::string& domain) {
  for (const auto& c : v.checks)
    if (c.domain == domain && !c.holds) return false;
  return true;
}

}  // namespace

AlignmentResidual alignment_residual(const CoreOverlapNoise& con, const ActiveSets& active,
                                     const std::vector<PairMargin>& pairs, double zeta,
                                     double gamma0, double eps_phys) {
  AlignmentResidual r;
  r.zeta = zeta;
  r.gamma0 = gamma0;
  r.noise_term = con.noise_frob * con.noise_frob;
  for (const auto& p : pairs) {
    const double v = pos(3.0 * p.o - (1.0 - zeta) * p.m);
    r.pair_term += v * v;
    if (p.nondegenerate) r.m_star = std::min(r.m_star, p.m);
  }
  for (double g : active.gap) {
    if (!std::isfinite(g)) continue;
    const double v = pos(gamma0 - g);
    r.gap_term += v * v;
  }
  r.j = r.noise_term + r.pair_term + r.gap_term;
  r.eps_phys = std::isnan(eps_phys) ? std::sqrt(r.j) : eps_phys;
  r.implication_applies = r.j <= r.eps_phys * r.eps_phys && std::isfinite(r.m_star) &&
                          r.m_star > 0 && r.eps_phys < zeta * r.m_star;
  if (r.implication_applies) r.c_overlap = (1.0 - zeta + r.eps_phys / r.m_star) / 3.0;
  return r;
}

GsaResidual gsa_residual(const std::vector<CartanFit>& fits,
                         const std::vector<InterfaceBudget>& budgets,
                         const std::vector<double>& noise_norms,
                         const std::vector<std::vector<PairMargin>>& pairs, double slope_min,
                         double eps_noise) {
  if (fits.size() != budgets.size() + 1 || noise_norms.size() != budgets.size() ||
      pairs.size() != budgets.size()) {
    fail(ErrorKind::kInput, "gsa_residual: missing interface data");
  }
  GsaResidual r;
  double log_sum = 0.0, chart_max = 0.0;
  for (const auto& f : fits) chart_max = std::max(chart_max, f.chart_error);
  for (size_t k = 0; k < budgets.size(); ++k) {
    r.d_spec += std::abs(fits[k + 1].alpha - fits[k].alpha);
    log_sum += budgets[k].log_budget;
    r.noise.push_back(noise_norms[k]);
    r.d_noise += noise_norms[k];
    double pk = 0.0;
    for (const auto& p : pairs[k])
      if (p.nondegenerate) pk += pos(3.0 * p.o - p.m);
    r.pair.push_back(pk);
    r.d_pair += pk;
  }
  r.total = r.d_spec + r.d_noise + r.d_pair;
  const double links = static_cast<double>(budgets.size());
  r.bound = 2.0 * log_sum / slope_min + 2.0 * links * chart_max / slope_min + links * eps_noise;
  r.bound_holds = r.total <= r.bound;
  return r;
}

double static_jacobian_proxy(const std::vector<LayerMatrix>& chain) {
  if (chain.empty()) return 0.0;
  Mat prod = chain[0].w;
  for (size_t k = 1; k < chain.size(); ++k) {
    if (chain[k].w.cols() != prod.rows()) {
      fail(ErrorKind::kDimension, "static proxy: layer " + chain[k].label + " does not compose");
    }
    prod = chain[k].w * prod;
  }
  return op_norm(prod);
}

BridgeReport bridge_check(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, const Mat& m_hat,
                          const AlignmentStructure& s, const CoreOverlapNoise& con,
                          const CertificateRadius& radius, const RankTransfer& rank, Index r) {
  const Mat t = full_transport(svd_k, svd_k1);
  if (m_hat.rows() != t.rows() || m_hat.cols() > t.cols()) {
    fail(ErrorKind::kDimension, "bridge_check: the alignment matrix is not a window of the full transport");
  }
  BridgeReport b;
  b.rank_lhs = rank.lhs;
  b.rank_margin = rank.margin;
  b.rank_ok = rank.certified;
  b.e_tr = truncation_bound(svd_k, svd_k1, r, std::min(r, svd_k1.d_sp));
  b.r_cert = radius.r_cert;
  b.residual = (t - pad_columns(con.core + con.overlap, t.cols())).norm();
  b.residual_bound = b.e_tr + con.noise_frob;
  b.residual_ok = b.residual <= b.residual_bound * (1.0 + 1e-10) + 1e-12 * t.norm();
  b.radius_ok = b.e_tr < b.r_cert;
  const AlignmentStructure padded = pad_structure(s, t.cols());
  const IncidenceSignature ref = incidence_signature(pad_columns(m_hat, t.cols()), padded);
  const IncidenceSignature full = incidence_signature(t, reextract(t, padded));
  b.reextraction_identical = ref == full;
  b.certified = b.rank_ok && b.residual_ok && b.radius_ok && b.reextraction_identical;
  return b;
}

LayerAnalysis analyze_layer(const LayerMatrix& layer, const ProtocolConfig& cfg) {
  LayerAnalysis la;
  la.label = layer.label;
  la.svd = gauged_svd(layer.w, cfg.rank_cutoff);
  const Index d = la.svd.d_sp;
  if (d == 0) fail(ErrorKind::kDegenerate, "layer " + la.label + " is numerically zero");
  const Vec head = la.svd.sigma.head(d);
  la.sigma_normalized = head * std::sqrt(static_cast<double>(d) / head.squaredNorm());
  la.r_eps = empirical_effective_rank(head, cfg.energy_threshold);
  try {
    const Index hi = cfg.fit_hi > 0 ? std::min(cfg.fit_hi, d) : d;
    la.fit = fit_power_law(head, cfg.fit_lo, hi);
    la.fit_ok = true;
  } catch (const Error& e) {
    la.fit_error = e.what();
  }
  return la;
}

ChainAnalysis analyze_chain(const std::vector<LayerMatrix>& input, const ProtocolConfig& cfg,
                            int threads, const std::string& name) {
  if (input.size() < 2) fail(ErrorKind::kManifest, "a chain needs at least two layers");
  if (!(cfg.energy_threshold > 0 && cfg.energy_threshold < 1)) {
    fail(ErrorKind::kConfig, "energy_threshold must lie in (0,1)");
  }
  std::vector<LayerMatrix> chain = input;
  if (cfg.square_embed)
    for (auto& l : chain) l = square_embed(l);
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    if (chain[k + 1].w.cols() != chain[k].w.rows()) {
      fail(ErrorKind::kDimension,
           "layers " + chain[k].label + " (" + std::to_string(chain[k].w.rows()) + "x" +
               std::to_string(chain[k].w.cols()) + ") and " + chain[k + 1].label + " (" +
               std::to_string(chain[k + 1].w.rows()) + "x" + std::to_string(chain[k + 1].w.cols()) +
               ") do not compose; set square_embed to pad them");
    }
  }

  ChainAnalysis a;
  a.name = name;
  const int n_layers = static_cast<int>(chain.size());
  a.layers.resize(n_layers);
  parallel_for(n_layers, threads, [&](int k) { a.layers[k] = analyze_layer(chain[k], cfg); });
  a.d = a.layers[0].svd.d_sp;
  for (const auto& l : a.layers) a.d = std::min(a.d, l.svd.d_sp);

  const int n_if = n_layers - 1;
  a.interfaces.resize(n_if);
  parallel_for(n_if, threads, [&](int k) {
    InterfaceAnalysis& ia = a.interfaces[k];
    const LayerAnalysis& lk = a.layers[k];
    const LayerAnalysis& lk1 = a.layers[k + 1];
    ia.k = k;
    ia.d_sp = lk.svd.d_sp;
    ia.budget = interface_budget(frobenius_normalize(chain[k].w, lk.svd.d_sp),
                                 frobenius_normalize(chain[k + 1].w, lk1.svd.d_sp));
    ia.window = cfg.fixed_rank > 0 ? cfg.fixed_rank : lk.r_eps;
    const Index rt = std::min(ia.window, lk1.svd.d_sp);
    ia.transport = build_transport(lk.svd, lk1.svd, cfg.variant, ia.window, rt, cfg.target_truncated);
    ia.transport.interface_index = k;
    ia.truncation = truncation_error(lk.svd, lk1.svd, ia.window, rt);
    const Mat& m = ia.transport.entries;
    const double eta = ia.truncation.bound;

    try {
      ia.rows = row_partition(cfg, lk1.svd, rt, ia.transport);
      ia.structure = extract_structure(m, ia.rows, cfg.support);
      ia.pairs = pairwise_margins(m, ia.structure);
      ia.con = decompose(m, ia.structure);
      ia.inc = incidence(ia.structure, m);
      ia.radius = certificate_radius(m, ia.structure, ia.pairs);
      ia.stability = stability_check(m, ia.structure, ia.pairs, eta);
      ia.residual = alignment_residual(ia.con, ia.structure.active, ia.pairs, cfg.zeta,
                                       cfg.gamma0, cfg.eps_phys);
    } catch (const Error& e) {
      ia.not_measured["alignment"] = e.what();
    }
    if (!ia.measured("alignment")) {
      for (const char* stage : {"block_energy", "icm", "bridge"})
        ia.not_measured[stage] = "alignment not measured";
    } else {
      try {
        ia.energy = block_energy(m, ia.rows.groups, ia.structure.active.sets);
        ia.bad = bad_mass(m, ia.rows.groups, ia.structure.active.sets, cfg.accepted);
        std::vector<PairMargin> nd;
        for (const auto& p : ia.pairs)
          if (p.nondegenerate) nd.push_back(p);
        ia.screen = margin_screen(ia.energy, nd);
      } catch (const Error& e) {
        ia.not_measured["block_energy"] = e.what();
      }
      try {
        ia.icm = icm_extract(ia.con, ia.structure, IcmThresholds{cfg.icm_q, cfg.tau_st, cfg.tau_sa},
                             srs_tag(ia.transport));
        ia.icm_deltas = icm_deltas(ia.icm, eta);
        ia.icm_stability = icm_stability(ia.icm, ia.icm_deltas.delta_row, ia.icm_deltas.delta_corr);
      } catch (const Error& e) {
        ia.not_measured["icm"] = e.what();
      }
    }

    if (lk.fit_ok && lk1.fit_ok) {
      ia.rank_transfer = rank_transfer_check(lk.fit, lk1.fit, a.d, cfg.energy_threshold,
                                             std::abs(lk1.fit.alpha - lk.fit.alpha), lk.r_eps,
                                             lk1.r_eps);
    } else {
      ia.not_measured["rank_transfer"] = "power-law fit unavailable";
    }

    if (ia.measured("alignment") && ia.measured("rank_transfer")) {
      if (cfg.variant != TransportVariant::kOutTotal) {
        ia.not_measured["bridge"] = "requires the out_total transport";
      } else {
        try {
          ia.bridge = bridge_check(lk.svd, lk1.svd, m, ia.structure, ia.con, ia.radius,
                                   ia.rank_transfer, ia.window);
        } catch (const Error& e) {
          ia.not_measured["bridge"] = e.what();
        }
      }
    } else if (!ia.not_measured.count("bridge")) {
      ia.not_measured["bridge"] = "inputs not measured";
    }

    if (cfg.window_alt > 0 && ia.measured("alignment")) {
      try {
        ia.window_check = window_robustness(lk.svd, lk1.svd, ia.window, cfg.window_alt, ia.rows.groups,
                                      ia.structure.active.sets);
      } catch (const Error& e) {
        ia.not_measured["window_robustness"] = e.what();
      }
    }
  });

  bool fits_ok = true;
  double lo = kInf, hi = -kInf;
  for (const auto& l : a.layers) {
    fits_ok = fits_ok && l.fit_ok;
    if (l.fit_ok) {
      lo = std::min(lo, l.fit.alpha);
      hi = std::max(hi, l.fit.alpha);
    }
  }
  a.interval = {std::isnan(cfg.interval_lo) ? lo : cfg.interval_lo,
                std::isnan(cfg.interval_hi) ? hi : cfg.interval_hi};
  if (fits_ok) {
    std::vector<CartanFit> fits;
    std::vector<InterfaceBudget> budgets;
    for (const auto& l : a.layers) fits.push_back(l.fit);
    for (const auto& i : a.interfaces) budgets.push_back(i.budget);
    try {
      a.tv = cartan_tv_bound(fits, budgets, a.interval, a.d);
      a.tv_measured = true;
    } catch (const Error&) {
      a.tv_measured = false;
    }
    if (a.tv_measured) {
      for (auto& ia : a.interfaces) {
        const auto& lk = a.layers[ia.k];
        const auto& lk1 = a.layers[ia.k + 1];
        ia.budget_rank_transfer =
            rank_transfer_check(lk.fit, lk1.fit, a.d, cfg.energy_threshold,
                                a.tv.displacement_budget[ia.k], lk.r_eps, lk1.r_eps);
      }
      std::vector<double> noise;
      std::vector<std::vector<PairMargin>> pairs;
      double noise_max = 0.0;
      for (const auto& ia : a.interfaces) {
        noise.push_back(ia.con.noise_frob);
        pairs.push_back(ia.pairs);
        noise_max = std::max(noise_max, ia.con.noise_frob);
      }
      a.residual = gsa_residual(fits, budgets, noise, pairs, a.tv.slope_min,
                                std::isnan(cfg.eps_noise) ? noise_max : cfg.eps_noise);
    }
  }
  a.domain = domain_membership(a, cfg, static_jacobian_proxy(chain));
  return a;
}

DomainVerdict domain_membership(const ChainAnalysis& a, const ProtocolConfig& cfg,
                                double static_proxy) {
  if (!(cfg.c_overlap > 0 && cfg.c_overlap < 1.0 / 3.0)) {
    fail(ErrorKind::kConfig, "c_overlap must lie in (0,1/3)");
  }
  DomainVerdict v;
  v.static_proxy = static_proxy;

  // Spectral domain.
  const bool have_m = !std::isnan(cfg.jacobian_bound);
  add(v, "spectral", "jacobian_bound", static_proxy, cfg.jacobian_bound, have_m,
      static_proxy <= cfg.jacobian_bound);
  Index failed = 0;
  for (const auto& l : a.layers) failed += l.fit_ok ? 0 : 1;
  add(v, "spectral", "power_law_fits", failed, 0, true, failed == 0);
  double dalpha = 0.0, dlogc = 0.0;
  for (size_t k = 0; k + 1 < a.layers.size(); ++k) {
    if (!a.layers[k].fit_ok || !a.layers[k + 1].fit_ok) continue;
    dalpha = std::max(dalpha, std::abs(a.layers[k + 1].fit.alpha - a.layers[k].fit.alpha));
    dlogc = std::max(dlogc, std::abs(std::log(a.layers[k + 1].fit.scale / a.layers[k].fit.scale)));
  }
  v.eps_alpha = cfg.eps_alpha;
  if (std::isnan(v.eps_alpha) && a.tv_measured && !a.tv.displacement_budget.empty()) {
    v.eps_alpha = *std::max_element(a.tv.displacement_budget.begin(), a.tv.displacement_budget.end());
  }
  v.eps_c = std::isnan(cfg.eps_c) ? dlogc : cfg.eps_c;
  add(v, "spectral", "alpha_variation", dalpha, v.eps_alpha, failed == 0 && !std::isnan(v.eps_alpha),
      dalpha <= v.eps_alpha);
  add(v, "spectral", "scale_variation", dlogc, v.eps_c, failed == 0, dlogc <= v.eps_c);

  // Compressibility cone.
  for (size_t k = 0; k < a.layers.size(); ++k) {
    const auto& l = a.layers[k];
    const Index cap = ceil_fraction(cfg.rho, l.svd.d_sp);
    add(v, "compressibility", "effective_rank[" + std::to_string(k) + "]", l.r_eps, cap, true,
        l.r_eps <= cap);
  }

  // Physical alignment domain.
  for (const auto& ia : a.interfaces) {
    const std::string tag = "[" + std::to_string(ia.k) + "]";
    const Index cap = ceil_fraction(cfg.rho, ia.d_sp);
    add(v, "physical", "window" + tag, ia.window, cap, true, ia.window <= cap);
    const bool aligned = ia.measured("alignment");
    add(v, "physical", "noise" + tag, ia.con.noise_frob, cfg.eps_noise,
        aligned && !std::isnan(cfg.eps_noise), ia.con.noise_frob <= cfg.eps_noise);
    double ratio = 0.0;
    bool ok = true;
    for (const auto& p : ia.pairs) {
      if (!p.nondegenerate) continue;
      ratio = std::max(ratio, p.o / p.m);
      ok = ok && p.o <= cfg.c_overlap * p.m;
    }
    add(v, "physical", "overlap" + tag, ratio, cfg.c_overlap, aligned, ok);
  }
  v.spectral = domain_ok(v, "spectral");
  v.compressibility = domain_ok(v, "compressibility");
  v.physical = domain_ok(v, "physical");
  v.full = v.spectral && v.compressibility && v.physical;

  // Complete numerical margin criterion.
  add(v, "margin", "tv_robust", a.tv.measured, a.tv.robust_bound, a.tv_measured,
      a.tv.applicable && a.tv.robust_holds);
  add(v, "margin", "residual_bound", a.residual.total, a.residual.bound, a.tv_measured,
      a.residual.bound_holds);
  for (const auto& ia : a.interfaces) {
    const std::string tag = "[" + std::to_string(ia.k) + "]";
    const bool rt = ia.measured("rank_transfer");
    add(v, "margin", "rank_transfer" + tag, ia.rank_transfer.lhs, ia.rank_transfer.margin, rt,
        ia.rank_transfer.certified);
    add(v, "margin", "empirical_rank_agree" + tag, ia.rank_transfer.r_emp_k1,
        ia.rank_transfer.r_emp_k, rt, ia.rank_transfer.empirical_agree);
    double gmin = kInf;
    for (double g : ia.structure.active.gap) gmin = std::min(gmin, g);
    add(v, "margin", "active_gap" + tag, gmin, 2.0 * ia.stability.omega, ia.measured("alignment"),
        ia.stability.gaps_ok);
    add(v, "margin", "pair_stability" + tag, 0.0, 0.0, ia.measured("alignment"),
        ia.stability.pairs_ok);
    add(v, "margin", "heatmap_screen" + tag, ia.screen.h_max, 1.0, ia.measured("block_energy"),
        ia.screen.all_certified);
    add(v, "margin", "bridge" + tag, ia.bridge.e_tr, ia.bridge.r_cert, ia.measured("bridge"),
        ia.bridge.certified);
    add(v, "margin", "icm_labels" + tag, ia.icm_deltas.delta_row, 0.0, ia.measured("icm"),
        ia.icm_stability.stable);
  }
  v.margin_criterion = v.full && domain_ok(v, "margin");
  return v;
}

IndexSets disjoint_bins(const AlignmentStructure& s) {
  IndexSets bins(s.active.sets.size());
  std::vector<bool> taken(s.cols, false);
  for (size_t i = 0; i < s.active.sets.size(); ++i) {
    for (Index c : s.active.sets[i]) {
      if (taken[c]) continue;
      taken[c] = true;
      bins[i].push_back(c);
    }
  }
  return bins;
}

FamilyReport family_check(const Mat& reference, const AlignmentStructure& s,
                          const std::vector<std::pair<std::string, Mat>>& views,
                          const AcceptedGraph& accepted,
                          const std::vector<CoarseView>& coarse_views) {
  FamilyReport r;
  const auto pairs = pairwise_margins(reference, s);
  const IncidenceSignature ref = incidence_signature(reference, s);
  const double f = reference.norm();

  double big_s = f, e_min = kInf;
  auto row_energy_min = [&](const Mat& m) {
    for (const auto& g : s.rows.groups) {
      double e = 0.0;
      for (Index row : g) e += m.row(row).squaredNorm();
      e_min = std::min(e_min, e);
    }
  };
  row_energy_min(reference);
  for (const auto& [name, m] : views) {
    if (m.rows() != reference.rows() || m.cols() != reference.cols()) {
      fail(ErrorKind::kDimension, "family_check: view '" + name + "' is on a different grid and has no coarsening map");
    }
    big_s = std::max(big_s, m.norm());
    row_energy_min(m);
  }
  const bool energy_ok = e_min > 0 && !s.rows.groups.empty();
  const BlockEnergyMatrix e_ref =
      energy_ok ? block_energy(reference, s.rows.groups, s.active.sets) : BlockEnergyMatrix{};

  for (const auto& [name, m] : views) {
    FamilyViewResult v;
    v.name = name;
    v.eta = (m - reference).norm();
    const StabilityVerdict sv = stability_check(reference, s, pairs, v.eta);
    v.gaps_ok = sv.gaps_ok;
    v.pairs_ok = sv.pairs_ok;
    v.certified = sv.certified;
    v.identical = incidence_signature(m, reextract(m, s)) == ref;
    if (energy_ok) {
      const BlockEnergyMatrix e = block_energy(m, s.rows.groups, s.active.sets);
      v.e_max_diff = (e.e - e_ref.e).cwiseAbs().maxCoeff();
      v.e_bound = block_energy_perturbation_bound(big_s, v.eta, e_min);
      v.e_bound_holds = v.e_max_diff <= v.e_bound * (1.0 + 1e-12) + 1e-15;
    }
    if (v.certified && v.identical) r.persistent.push_back(name);
    if (!v.certified) r.flagged.push_back(name);
    if (v.certified && !v.identical) r.persistence_holds = false;
    r.views.push_back(v);
  }
  if (!coarse_views.empty()) {
    const IndexSets bins = disjoint_bins(s);
    for (const auto& cv : coarse_views) {
      r.coarse.emplace_back(cv.name, coarsen(cv.m, s.rows.groups, bins, cv.pi_r, cv.pi_c, accepted));
    }
  }
  return r;
}

}  // namespace gsacert
