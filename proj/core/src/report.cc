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

#include "gsacert/report.h"

#include <algorithm>
#include <cmath>

#include "gsacert/config.h"

namespace gsacert {
namespace {

Json maybe(bool measured, double x) { return measured ? number(x) : Json(kNotMeasured); }

Json bools(const std::vector<bool>& v) {
  Json j = Json::array();
  for (bool b : v) j.push_back(b);
  return j;
}

Json pairs_of(const std::vector<std::pair<Index, Index>>& v) {
  Json j = Json::array();
  for (const auto& [a, b] : v) j.push_back(Json::array({a, b}));
  return j;
}

Json fit_json(const CartanFit& f) {
  Json j;
  j["alpha"] = number(f.alpha);
  j["scale"] = number(f.scale);
  j["delta_pl"] = number(f.delta_pl);
  j["chart_error"] = number(f.chart_error);
  j["tail_error"] = number(f.tail_error);
  j["regression_residual"] = number(f.regression_residual);
  j["fit_range"] = Json::array({f.fit_lo, f.fit_hi});
  return j;
}

Json rank_transfer_json(const RankTransfer& r) {
  Json j;
  j["displacement"] = number(r.displacement);
  j["lhs"] = number(r.lhs);
  j["margin"] = number(r.margin);
  j["certified"] = r.certified;
  j["r_model"] = r.r_model;
  j["r_emp_source"] = r.r_emp_k;
  j["r_emp_target"] = r.r_emp_k1;
  j["empirical_agree"] = r.empirical_agree;
  return j;
}

Json partition_json(const RowPartition& p) {
  Json j;
  j["groups"] = to_json(p.groups);
  j["unassigned"] = to_json(p.unassigned);
  if (!p.mode_of_group.empty()) {
    j["mode_of_group"] = to_json(p.mode_of_group);
    j["theta"] = number(p.theta);
    j["mu"] = number(p.mu);
    j["min_threshold_margin"] =
        number(p.threshold_margin.size() ? p.threshold_margin.minCoeff() : kInf);
    j["min_gap_margin"] = number(p.gap_margin.size() ? p.gap_margin.minCoeff() : kInf);
  }
  return j;
}

Json structure_json(const AlignmentStructure& s) {
  Json j;
  j["row_perm"] = to_json(s.row_perm);
  j["col_perm"] = to_json(s.col_perm);
  j["active_sets"] = to_json(s.active.sets);
  j["support_sizes"] = to_json(s.active.size);
  j["active_gaps"] = Json::array();
  for (double g : s.active.gap) j["active_gaps"].push_back(number(g));
  return j;
}

Json pair_json(const PairMargin& p) {
  Json j;
  j["i"] = p.i;
  j["j"] = p.j;
  j["core_ij"] = number(p.core_ij);
  j["core_ji"] = number(p.core_ji);
  j["m"] = number(p.m);
  j["o"] = number(p.o);
  j["overlap_frob"] = number(p.overlap_frob);
  j["delta_sigma"] = number(p.delta_sigma);
  j["gamma"] = number(p.gamma);
  j["shares_support"] = p.shares_support;
  j["nondegenerate"] = p.nondegenerate;
  j["one_third_holds"] = p.one_third_holds;
  j["half_gap_holds"] = p.half_gap_holds;
  j["frobenius_holds"] = p.frobenius_holds;
  j["slack"] = number(p.slack);
  return j;
}

Json icm_json(const IcmAnatomy& a) {
  Json j;
  j["srs_tag"] = a.srs_tag;
  j["groups"] = Json::array();
  for (const auto& g : a.groups) {
    Json e;
    e["sc"] = to_json(g.sc);
    e["st"] = to_json(g.st);
    e["sa"] = to_json(g.sa);
    e["srs"] = to_json(g.srs);
    e["gamma_sc"] = number(g.gamma_sc);
    e["gamma_st"] = number(g.gamma_st);
    e["gamma_sa"] = number(g.gamma_sa);
    e["gamma_profile"] = number(g.gamma_prof);
    e["min_row_norm"] = number(g.min_row_norm);
    e["row_energy"] = to_json(g.row_energy);
    j["groups"].push_back(e);
  }
  j["hubs"] = to_json(a.hubs);
  j["noise_rows"] = to_json(a.noise_rows);
  j["noise_frob"] = number(a.noise_frob);
  j["noise_entries"] = a.noise_entries;
  return j;
}

Json perturb_json(const PerturbReport& p) {
  Json j;
  j["delta"] = number(p.delta);
  j["s"] = number(p.s);
  j["e_min"] = number(p.e_min);
  j["bound"] = number(p.bound);
  j["max_diff"] = number(p.max_diff);
  j["holds"] = p.holds;
  return j;
}

double min_gap(const InterfaceAnalysis& ia) {
  double g = kInf;
  for (double x : ia.structure.active.gap) g = std::min(g, x);
  return g;
}

// max 3o/m over nondegenerate pairs; 0 when there are none.
double max_overlap_ratio(const InterfaceAnalysis& ia) {
  double r = 0.0;
  for (const auto& p : ia.pairs)
    if (p.nondegenerate) r = std::max(r, 3.0 * p.o / p.m);
  return r;
}

}  // namespace

std::vector<BaselineRun> run_baselines(const std::vector<LayerMatrix>& chain,
                                       const ProtocolConfig& cfg, int threads) {
  std::vector<BaselineRun> runs;
  for (Baseline b : cfg.baselines) {
    BaselineRun run;
    run.kind = b;
    try {
      run.analysis = analyze_chain(make_baseline(chain, b, cfg.seed), cfg, threads, baseline_name(b));
      run.ran = true;
    } catch (const Error& e) {
      run.error = e.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

Json layer_json(const LayerAnalysis& l) {
  Json j;
  j["label"] = l.label;
  j["rows"] = l.svd.rows();
  j["cols"] = l.svd.cols();
  j["d_sp"] = l.svd.d_sp;
  j["op_norm"] = number(l.svd.op_norm());
  j["frob_sq"] = number(l.svd.frob_sq());
  j["r_eps"] = l.r_eps;
  j["fit"] = l.fit_ok ? fit_json(l.fit) : Json(kNotMeasured);
  if (!l.fit_ok) j["fit_error"] = l.fit_error;
  j["sigma"] = to_json(Vec(l.svd.sigma.head(l.svd.d_sp)));
  return j;
}

Json interface_json(const InterfaceAnalysis& ia) {
  const bool al = ia.measured("alignment");
  const bool be = ia.measured("block_energy");
  const bool icm = ia.measured("icm");
  const bool rt = ia.measured("rank_transfer");
  const bool br = ia.measured("bridge");
  Json j;
  j["k"] = ia.k;
  Json coords;
  coords["variant"] = variant_name(ia.transport.variant);
  coords["rows"] = row_coords_name(ia.transport.row_coords);
  coords["cols"] = col_coords_name(ia.transport.col_coords);
  coords["srs_hub_objects"] =
      ia.transport.col_coords == ColCoords::kSourceMode ? "source modes" : "physical input channels";
  coords["target_truncated"] = ia.transport.target_truncated;
  j["coordinates"] = coords;
  j["window"] = Json::array({ia.transport.rs, ia.transport.rt});
  j["d_sp"] = ia.d_sp;

  Json b;
  b["lambda"] = number(ia.budget.lambda);
  b["log_budget"] = number(ia.budget.log_budget);
  b["non_backtracking"] = ia.budget.non_backtracking;
  b["norm_source"] = number(ia.budget.norm_prev);
  b["norm_target"] = number(ia.budget.norm_next);
  b["norm_product"] = number(ia.budget.norm_product);
  j["budget"] = b;

  Json t;
  t["bound"] = number(ia.truncation.bound);
  t["measured"] = number(ia.truncation.measured);
  t["measured_physical"] = number(ia.truncation.measured_physical);
  t["target_tail_residual"] = number(ia.transport.target_tail_residual);
  j["truncation"] = t;

  j["partition"] = al ? partition_json(ia.rows) : Json(kNotMeasured);
  j["structure"] = al ? structure_json(ia.structure) : Json(kNotMeasured);
  if (al) {
    j["pairs"] = Json::array();
    for (const auto& p : ia.pairs) j["pairs"].push_back(pair_json(p));
    Json d;
    d["core_frob"] = number(ia.con.core_frob);
    d["overlap_frob"] = number(ia.con.overlap_frob);
    d["noise_frob"] = number(ia.con.noise_frob);
    d["total_frob"] = number(ia.con.total_frob);
    d["dedicated"] = to_json(ia.con.dedicated);
    d["shared"] = to_json(ia.con.shared);
    j["decomposition"] = d;
    Json inc;
    inc["degree"] = to_json(ia.inc.degree);
    inc["edges"] = pairs_of(ia.inc.edges);
    inc["shared_pairs"] = pairs_of(ia.inc.shared);
    inc["hubs"] = to_json(ia.inc.hubs);
    inc["hub_info"] = Json::array();
    for (const auto& h : ia.inc.hub_info) {
      Json e;
      e["column"] = h.column;
      e["groups"] = to_json(h.groups);
      e["energy"] = number(h.energy);
      e["min_segment"] = number(h.min_segment);
      e["bound"] = number(h.bound);
      e["bound_holds"] = h.bound_holds;
      inc["hub_info"].push_back(e);
    }
    j["incidence"] = inc;
    Json r;
    r["r_cert"] = number(ia.radius.r_cert);
    r["r_gamma"] = Json::array();
    for (double x : ia.radius.r_gamma) r["r_gamma"].push_back(number(x));
    r["r_pair"] = Json::array();
    for (const auto& p : ia.radius.r_pair) r["r_pair"].push_back(Json::array({p.i, p.j, number(p.r)}));
    r["margins_positive"] = ia.radius.margins_positive;
    j["radius"] = r;
    Json s;
    s["eta"] = number(ia.stability.eta);
    s["omega"] = number(ia.stability.omega);
    s["gaps_ok"] = ia.stability.gaps_ok;
    s["pairs_ok"] = ia.stability.pairs_ok;
    s["certified"] = ia.stability.certified;
    j["stability"] = s;
    Json ar;
    ar["zeta"] = number(ia.residual.zeta);
    ar["gamma0"] = number(ia.residual.gamma0);
    ar["j"] = number(ia.residual.j);
    ar["noise_term"] = number(ia.residual.noise_term);
    ar["pair_term"] = number(ia.residual.pair_term);
    ar["gap_term"] = number(ia.residual.gap_term);
    ar["m_star"] = number(ia.residual.m_star);
    ar["eps_phys"] = number(ia.residual.eps_phys);
    ar["implication_applies"] = ia.residual.implication_applies;
    ar["c_overlap"] = number(ia.residual.c_overlap);
    j["alignment_residual"] = ar;
  } else {
    for (const char* k : {"pairs", "decomposition", "incidence", "radius", "stability",
                          "alignment_residual"})
      j[k] = kNotMeasured;
  }

  if (be) {
    Json e;
    e["matrix"] = to_json(ia.energy.e);
    e["row_energy"] = to_json(ia.energy.row_energy);
    e["off_mass"] = number(ia.energy.off_mass);
    e["diag_mass"] = number(ia.energy.diag_mass);
    e["bad_normalized"] = number(ia.bad.normalized);
    e["bad_unnormalized"] = number(ia.bad.unnormalized);
    e["bad_bound_rhs"] = number(ia.bad.bound_rhs);
    e["bad_chain_holds"] = ia.bad.chain_holds;
    Json sc;
    sc["h_max"] = number(ia.screen.h_max);
    sc["zeta"] = number(ia.screen.zeta);
    sc["all_certified"] = ia.screen.all_certified;
    sc["pairs"] = Json::array();
    for (const auto& p : ia.screen.pairs) {
      Json q;
      q["i"] = p.i;
      q["j"] = p.j;
      q["numerator"] = number(p.numerator);
      q["m"] = number(p.m);
      q["h"] = number(p.h);
      q["slack"] = number(p.slack);
      q["certified"] = p.certified;
      sc["pairs"].push_back(q);
    }
    e["screen"] = sc;
    j["block_energy"] = e;
  } else {
    j["block_energy"] = kNotMeasured;
  }

  if (icm) {
    Json i = icm_json(ia.icm);
    i["delta_row"] = number(ia.icm_deltas.delta_row);
    i["delta_corr"] = number(ia.icm_deltas.delta_corr);
    i["sc_stable"] = bools(ia.icm_stability.sc_ok);
    i["st_stable"] = bools(ia.icm_stability.st_ok);
    i["sa_stable"] = bools(ia.icm_stability.sa_ok);
    i["labels_stable"] = ia.icm_stability.stable;
    j["icm"] = i;
  } else {
    j["icm"] = kNotMeasured;
  }

  j["rank_transfer"] = rt ? rank_transfer_json(ia.rank_transfer) : Json(kNotMeasured);
  j["budget_rank_transfer"] =
      rt && ia.budget_rank_transfer.r_model > 0 ? rank_transfer_json(ia.budget_rank_transfer)
                                                 : Json(kNotMeasured);
  if (br) {
    Json bj;
    bj["rank_lhs"] = number(ia.bridge.rank_lhs);
    bj["rank_margin"] = number(ia.bridge.rank_margin);
    bj["rank_ok"] = ia.bridge.rank_ok;
    bj["residual"] = number(ia.bridge.residual);
    bj["residual_bound"] = number(ia.bridge.residual_bound);
    bj["residual_ok"] = ia.bridge.residual_ok;
    bj["e_tr"] = number(ia.bridge.e_tr);
    bj["r_cert"] = number(ia.bridge.r_cert);
    bj["radius_ok"] = ia.bridge.radius_ok;
    bj["reextraction_identical"] = ia.bridge.reextraction_identical;
    bj["certified"] = ia.bridge.certified;
    j["bridge"] = bj;
  } else {
    j["bridge"] = kNotMeasured;
  }
  if (ia.window_check) {
    Json w;
    w["r"] = ia.window_check->r;
    w["r_alt"] = ia.window_check->r_alt;
    w["delta_bound"] = number(ia.window_check->delta_bound);
    w["delta_measured"] = number(ia.window_check->delta_measured);
    w["entrywise"] = perturb_json(ia.window_check->check);
    j["window_robustness"] = w;
  }
  Json nm = Json::object();
  for (const auto& [stage, why] : ia.not_measured) nm[stage] = why;
  j["not_measured"] = nm;
  return j;
}

Json domain_json(const DomainVerdict& v) {
  Json j;
  j["spectral"] = v.spectral;
  j["compressibility"] = v.compressibility;
  j["physical"] = v.physical;
  j["full"] = v.full;
  j["margin_criterion"] = v.margin_criterion;
  j["eps_alpha"] = number(v.eps_alpha);
  j["eps_c"] = number(v.eps_c);
  j["static_jacobian_proxy"] = number(v.static_proxy);
  j["checks"] = Json::array();
  for (const auto& c : v.checks) {
    Json e;
    e["domain"] = c.domain;
    e["name"] = c.name;
    e["lhs"] = maybe(c.measured, c.lhs);
    e["rhs"] = maybe(c.measured, c.rhs);
    e["measured"] = c.measured;
    e["holds"] = c.holds;
    j["checks"].push_back(e);
  }
  return j;
}

Json certificate_entries(const ChainAnalysis& a, const ProtocolConfig& cfg) {
  Json rows = Json::array();
  for (const auto& ia : a.interfaces) {
    const auto& src = a.layers[ia.k];
    const auto& tgt = a.layers[ia.k + 1];
    const bool al = ia.measured("alignment");
    const bool be = ia.measured("block_energy");
    const bool rt = ia.measured("rank_transfer");
    Json r;
    r["k"] = ia.k;
    r["r_eps"] = src.r_eps;
    r["r_eps_target"] = tgt.r_eps;
    r["alpha_hat"] = maybe(src.fit_ok, src.fit.alpha);
    r["alpha_hat_target"] = maybe(tgt.fit_ok, tgt.fit.alpha);
    r["delta_tail"] = maybe(src.fit_ok, src.fit.tail_error);
    r["delta_tail_target"] = maybe(tgt.fit_ok, tgt.fit.tail_error);
    r["rank_stability_lhs"] = maybe(rt, ia.rank_transfer.lhs);
    r["rank_margin"] = maybe(rt, ia.rank_transfer.margin);
    r["rank_stability_holds"] = rt && ia.rank_transfer.certified;
    r["e_tr"] = number(ia.truncation.bound);
    r["r_cert"] = maybe(al, ia.radius.r_cert);
    r["e_tr_below_r_cert"] = al && ia.truncation.bound < ia.radius.r_cert;
    r["min_gamma"] = maybe(al, min_gap(ia));
    r["two_omega"] = maybe(al, 2.0 * ia.stability.omega);
    r["gap_condition_holds"] = al && ia.stability.gaps_ok;
    r["max_3o_over_m"] = maybe(al, max_overlap_ratio(ia));
    r["h_max"] = maybe(be, ia.screen.h_max);
    r["one_third_holds"] = al && max_overlap_ratio(ia) < 1.0;
    const double ratio = ia.con.total_frob > 0 ? ia.con.noise_frob / ia.con.total_frob : 0.0;
    r["noise_ratio"] = maybe(al, ratio);
    r["noise_frob"] = maybe(al, ia.con.noise_frob);
    r["noise_tolerance"] = std::isnan(cfg.eps_noise) ? Json(kNotMeasured) : number(cfg.eps_noise);
    r["noise_holds"] = al && !std::isnan(cfg.eps_noise) && ia.con.noise_frob <= cfg.eps_noise;
    rows.push_back(r);
  }
  return rows;
}

Json baseline_json(const BaselineRun& b, const ChainAnalysis& trained, const ProtocolConfig& cfg) {
  Json j;
  j["baseline"] = baseline_name(b.kind);
  j["ran"] = b.ran;
  if (!b.ran) {
    j["error"] = b.error;
    return j;
  }
  Json v;
  v["spectral"] = b.analysis.domain.spectral;
  v["compressibility"] = b.analysis.domain.compressibility;
  v["physical"] = b.analysis.domain.physical;
  v["full"] = b.analysis.domain.full;
  v["margin_criterion"] = b.analysis.domain.margin_criterion;
  j["verdicts"] = v;
  j["entries"] = certificate_entries(b.analysis, cfg);
  // Recorded comparisons, never asserted.
  Json cmp = Json::array();
  for (std::size_t k = 0; k < trained.interfaces.size() && k < b.analysis.interfaces.size(); ++k) {
    const auto& t = trained.interfaces[k];
    const auto& n = b.analysis.interfaces[k];
    Json c;
    c["k"] = static_cast<Index>(k);
    const bool both = t.measured("alignment") && n.measured("alignment");
    c["trained_r_cert_exceeds"] = both ? Json(t.radius.r_cert > n.radius.r_cert) : Json(kNotMeasured);
    c["trained_min_gamma_exceeds"] = both ? Json(min_gap(t) > min_gap(n)) : Json(kNotMeasured);
    c["trained_overlap_ratio_below"] =
        both ? Json(max_overlap_ratio(t) < max_overlap_ratio(n)) : Json(kNotMeasured);
    cmp.push_back(c);
  }
  j["comparison"] = cmp;
  Json nm = Json::object();
  for (const auto& ia : b.analysis.interfaces)
    for (const auto& [stage, why] : ia.not_measured)
      nm[std::to_string(ia.k) + "/" + stage] = why;
  j["not_measured"] = nm;
  return j;
}

Json make_report(const ChainAnalysis& a, const ProtocolConfig& cfg, const Manifest* manifest,
                 const std::vector<BaselineRun>& baselines) {
  Json j;
  j["format"] = "gsacert-report";
  j["format_version"] = 1;
  j["chain"] = a.name;
  j["spectral_length"] = a.d;
  if (manifest) {
    Json m = Json::array();
    for (const auto& l : manifest->layers) {
      Json e;
      e["file"] = l.file;
      e["label"] = l.label;
      e["provenance"] = l.provenance;
      e["flattening"] = l.flattening;
      m.push_back(e);
    }
    j["operators"] = m;
  }
  j["protocol"] = config_to_json(cfg);
  j["layers"] = Json::array();
  for (const auto& l : a.layers) j["layers"].push_back(layer_json(l));
  j["interfaces"] = Json::array();
  for (const auto& ia : a.interfaces) j["interfaces"].push_back(interface_json(ia));

  Json c;
  c["interval"] = Json::array({number(a.interval.lo), number(a.interval.hi)});
  if (a.tv_measured) {
    Json tv;
    tv["measured"] = number(a.tv.measured);
    tv["exact_bound"] = number(a.tv.exact_bound);
    tv["robust_bound"] = number(a.tv.robust_bound);
    tv["slope_min"] = number(a.tv.slope_min);
    tv["applicable"] = a.tv.applicable;
    tv["exact_holds"] = a.tv.exact_holds;
    tv["robust_holds"] = a.tv.robust_holds;
    tv["displacement_budget"] = Json::array();
    for (double x : a.tv.displacement_budget) tv["displacement_budget"].push_back(number(x));
    c["total_variation"] = tv;
    Json r;
    r["d_spec"] = number(a.residual.d_spec);
    r["d_noise"] = number(a.residual.d_noise);
    r["d_pair"] = number(a.residual.d_pair);
    r["total"] = number(a.residual.total);
    r["bound"] = number(a.residual.bound);
    r["bound_holds"] = a.residual.bound_holds;
    c["gsa_residual"] = r;
  } else {
    c["total_variation"] = kNotMeasured;
    c["gsa_residual"] = kNotMeasured;
  }
  j["chain_level"] = c;
  j["certificate_entries"] = certificate_entries(a, cfg);
  j["domain"] = domain_json(a.domain);
  j["baselines"] = Json::array();
  for (const auto& b : baselines) j["baselines"].push_back(baseline_json(b, a, cfg));
  return j;
}

}  // namespace gsacert
