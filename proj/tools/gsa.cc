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

// gsa: command line front end for the gsacert library.
//
//   gsa certify --manifest chain.json --config protocol.json --out report/
//   gsa synth --out fixture/ --seed 7
//
// Every subcommand writes JSON records (and, where relevant, CSV matrices and
// PGM heatmaps) into --out. Errors exit with a kind-specific code.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsacert/capacity.h"
#include "gsacert/certificate.h"
#include "gsacert/config.h"
#include "gsacert/container.h"
#include "gsacert/errors.h"
#include "gsacert/finetune.h"
#include "gsacert/json_out.h"
#include "gsacert/report.h"

namespace {

using namespace gsacert;

struct Common {
  std::string manifest;
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::vector<std::string> baselines;
};

struct Session {
  Manifest manifest;
  ProtocolConfig cfg;
  std::vector<LayerMatrix> chain;
};

void add_common(CLI::App* app, Common& c, bool needs_manifest = true) {
  auto* m = app->add_option("--manifest", c.manifest, "Chain manifest (JSON)");
  if (needs_manifest) m->required();
  app->add_option("--config", c.config, "Protocol config (JSON); defaults if omitted");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "Overrides the config seed");
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--baseline", c.baselines, "Null baseline (repeatable)")
      ->check(CLI::IsMember({"gaussian", "spectrum-preserving", "permuted"}));
}

ProtocolConfig load_config(const Common& c) {
  ProtocolConfig cfg = c.config.empty() ? ProtocolConfig{} : read_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.baselines.empty()) {
    cfg.baselines.clear();
    for (const auto& b : c.baselines) cfg.baselines.push_back(parse_baseline(b));
  }
  return cfg;
}

Session open_session(const Common& c) {
  Session s;
  s.manifest = read_manifest(c.manifest);
  s.cfg = load_config(c);
  s.chain = load_chain(s.manifest, s.cfg.square_embed);
  return s;
}

std::string out_path(const Common& c, const std::string& name) { return join_path(c.out, name); }

Mat permuted(const Mat& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Mat p(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) p(r, c) = m(rows[r], cols[c]);
  return p;
}

// Scale-free angular transport on the same window as the interface.
Mat angular_transport(const ChainAnalysis& a, const InterfaceAnalysis& ia) {
  return build_transport(a.layers[ia.k].svd, a.layers[ia.k + 1].svd, TransportVariant::kOutAng,
                         ia.transport.rs, ia.transport.rt)
      .entries;
}

void emit(const Common& c, const std::string& name, const Mat& m, const std::string& what) {
  write_csv(out_path(c, name + ".csv"), m);
  write_pgm(out_path(c, name + ".pgm"), m, what);
}

// Permuted M and M_s, and their block-energy matrices, for every measured
// interface.
Json write_heatmaps(const Common& c, const ChainAnalysis& a, bool matrices, bool energies) {
  Json files = Json::array();
  for (const auto& ia : a.interfaces) {
    if (!ia.measured("alignment")) continue;
    const std::string k = std::to_string(ia.k);
    const Mat& m = ia.transport.entries;
    const Mat ms = angular_transport(a, ia);
    const auto& rp = ia.structure.row_perm;
    const auto& cp = ia.structure.col_perm;
    if (matrices) {
      emit(c, "M_" + k, permuted(m, rp, cp), "permuted M, interface " + k);
      emit(c, "Ms_" + k, permuted(ms, rp, cp), "permuted M_s, interface " + k);
      files.push_back("M_" + k);
      files.push_back("Ms_" + k);
    }
    if (energies && ia.measured("block_energy")) {
      const auto& groups = ia.rows.groups;
      const auto& sets = ia.structure.active.sets;
      emit(c, "Er_M_" + k, ia.energy.e, "E_r(M), interface " + k);
      emit(c, "Er_Ms_" + k, block_energy(ms, groups, sets).e, "E_r(M_s), interface " + k);
      files.push_back("Er_M_" + k);
      files.push_back("Er_Ms_" + k);
    }
  }
  return files;
}

int cmd_fit_spectra(const Common& c) {
  Session s = open_session(c);
  Json j;
  j["layers"] = Json::array();
  Json alphas = Json::array();
  for (std::size_t k = 0; k < s.chain.size(); ++k) {
    const LayerAnalysis la = analyze_layer(s.chain[k], s.cfg);
    j["layers"].push_back(layer_json(la));
    alphas.push_back(la.fit_ok ? number(la.fit.alpha) : Json(kNotMeasured));
    write_csv(out_path(c, "sigma_" + std::to_string(k) + ".csv"), la.svd.sigma.head(la.svd.d_sp));
  }
  j["alpha_trajectory"] = alphas;
  write_json(out_path(c, "spectra.json"), j);
  return 0;
}

int cmd_rank_window(const Common& c) {
  Session s = open_session(c);
  const double eps = s.cfg.energy_threshold;
  std::vector<LayerAnalysis> layers;
  Json j;
  j["energy_threshold"] = number(eps);
  j["layers"] = Json::array();
  for (const auto& l : s.chain) {
    layers.push_back(analyze_layer(l, s.cfg));
    const auto& la = layers.back();
    Json e;
    e["label"] = la.label;
    e["d_sp"] = la.svd.d_sp;
    e["r_eps"] = la.r_eps;
    if (la.fit_ok && la.fit.alpha > 0.5) {
      const RankMargins rm = rank_margins(la.svd.d_sp, la.fit.alpha, eps);
      const RankBounds rb = model_rank_bounds(la.svd.d_sp, la.fit.alpha, eps);
      e["alpha_hat"] = number(la.fit.alpha);
      e["r_model"] = rm.r_model;
      e["rank_margin"] = number(rm.margin);
      e["model_lower"] = rb.lower;
      e["model_upper"] = rb.upper;
      e["tail_error"] = number(la.fit.tail_error);
    } else {
      e["r_model"] = kNotMeasured;
    }
    j["layers"].push_back(e);
  }
  Index d = layers.front().svd.d_sp;
  for (const auto& l : layers) d = std::min(d, l.svd.d_sp);
  j["interfaces"] = Json::array();
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    const auto& a = layers[k];
    const auto& b = layers[k + 1];
    Json e;
    e["k"] = static_cast<Index>(k);
    if (a.fit_ok && b.fit_ok) {
      const RankTransfer rt = rank_transfer_check(a.fit, b.fit, d, eps,
                                                  std::abs(b.fit.alpha - a.fit.alpha), a.r_eps,
                                                  b.r_eps);
      e["lhs"] = number(rt.lhs);
      e["margin"] = number(rt.margin);
      e["certified"] = rt.certified;
      e["empirical_agree"] = rt.empirical_agree;
    } else {
      e["lhs"] = kNotMeasured;
    }
    j["interfaces"].push_back(e);
  }
  write_json(out_path(c, "rank_window.json"), j);
  return 0;
}

int cmd_transport(const Common& c) {
  Session s = open_session(c);
  if (s.chain.size() < 2) fail(ErrorKind::kManifest, c.manifest + ": a chain needs at least two layers");
  Json j;
  j["variant"] = variant_name(s.cfg.variant);
  j["interfaces"] = Json::array();
  std::vector<GaugedSvd> svd;
  std::vector<Index> r_eps;
  for (const auto& l : s.chain) {
    const LayerAnalysis la = analyze_layer(l, s.cfg);
    svd.push_back(la.svd);
    r_eps.push_back(la.r_eps);
  }
  for (std::size_t k = 0; k + 1 < svd.size(); ++k) {
    const Index rs = s.cfg.fixed_rank > 0 ? s.cfg.fixed_rank : r_eps[k];
    const Index rt = std::min(rs, svd[k + 1].d_sp);
    const TransportMatrix t =
        build_transport(svd[k], svd[k + 1], s.cfg.variant, rs, rt, s.cfg.target_truncated);
    const TruncationError te = truncation_error(svd[k], svd[k + 1], rs, rt);
    const std::string name = "transport_" + std::to_string(k);
    emit(c, name, t.entries, std::string(variant_name(t.variant)) + ", interface " + std::to_string(k));
    Json e;
    e["k"] = static_cast<Index>(k);
    e["file"] = name;
    e["rows"] = t.entries.rows();
    e["cols"] = t.entries.cols();
    e["row_coords"] = row_coords_name(t.row_coords);
    e["col_coords"] = col_coords_name(t.col_coords);
    e["window"] = Json::array({rs, rt});
    e["truncation_bound"] = number(te.bound);
    e["truncation_measured"] = number(te.measured);
    e["target_tail_residual"] = number(t.target_tail_residual);
    j["interfaces"].push_back(e);
  }
  write_json(out_path(c, "transport.json"), j);
  return 0;
}

ChainAnalysis run_chain(const Common& c, Session& s) {
  return analyze_chain(s.chain, s.cfg, c.threads, s.manifest.name);
}

int cmd_align(const Common& c) {
  Session s = open_session(c);
  const ChainAnalysis a = run_chain(c, s);
  Json j;
  j["interfaces"] = Json::array();
  for (const auto& ia : a.interfaces) {
    const Json full = interface_json(ia);
    Json e;
    for (const char* key : {"k", "coordinates", "window", "partition", "structure", "pairs",
                            "decomposition", "incidence", "radius", "stability",
                            "alignment_residual", "not_measured"})
      e[key] = full[key];
    j["interfaces"].push_back(e);
    if (ia.measured("alignment")) {
      std::vector<int> labels(ia.rows.rows(), 0);
      for (std::size_t g = 0; g < ia.rows.groups.size(); ++g)
        for (Index r : ia.rows.groups[g]) labels[r] = static_cast<int>(g) + 1;
      write_partition(out_path(c, "partition_" + std::to_string(ia.k) + ".txt"), labels);
    }
  }
  j["heatmaps"] = write_heatmaps(c, a, true, false);
  write_json(out_path(c, "align.json"), j);
  return 0;
}

int cmd_block_energy(const Common& c) {
  Session s = open_session(c);
  const ChainAnalysis a = run_chain(c, s);
  Json j;
  j["interfaces"] = Json::array();
  for (const auto& ia : a.interfaces) {
    Json e;
    e["k"] = ia.k;
    e["block_energy"] = interface_json(ia)["block_energy"];
    if (ia.measured("block_energy")) {
      const Mat ms = angular_transport(a, ia);
      const auto& groups = ia.rows.groups;
      const auto& sets = ia.structure.active.sets;
      const BlockEnergyMatrix ems = block_energy(ms, groups, sets);
      e["angular_matrix"] = to_json(ems.e);
      e["angular_bad_normalized"] = number(bad_mass_normalized(ems, s.cfg.accepted));
      if (ia.transport.row_coords == RowCoords::kPhysicalOutput) {
        // M = L_R M_s with L_R = U^(R) Sigma^(R) U^(R)^T on the target side.
        const auto& t = a.layers[ia.k + 1].svd;
        const Index rt = ia.transport.rt;
        const Mat l = t.u.leftCols(rt) * t.sigma.head(rt).asDiagonal() * t.u.leftCols(rt).transpose();
        const LeakageReport lr =
            row_leakage(ms, l, groups, disjoint_bins(ia.structure), s.cfg.accepted);
        Json leak = Json::array();
        for (const auto& row : lr.rows) {
          Json q;
          q["bad_angular"] = number(row.bad_a);
          q["bad_weighted"] = number(row.bad_b);
          q["bound"] = number(row.bound);
          q["holds"] = row.holds;
          leak.push_back(q);
        }
        e["row_leakage"] = leak;
        e["row_leakage_holds"] = lr.holds;
      }
    }
    j["interfaces"].push_back(e);
  }
  j["heatmaps"] = write_heatmaps(c, a, false, true);
  write_json(out_path(c, "block_energy.json"), j);
  return 0;
}

int cmd_icm(const Common& c) {
  Session s = open_session(c);
  const ChainAnalysis a = run_chain(c, s);
  Json j;
  j["interfaces"] = Json::array();
  for (const auto& ia : a.interfaces) {
    Json e;
    e["k"] = ia.k;
    e["icm"] = interface_json(ia)["icm"];
    j["interfaces"].push_back(e);
  }
  write_json(out_path(c, "icm.json"), j);
  return 0;
}

int cmd_certify(const Common& c) {
  Session s = open_session(c);
  const ChainAnalysis a = run_chain(c, s);
  const auto baselines = run_baselines(s.chain, s.cfg, c.threads);
  Json report = make_report(a, s.cfg, &s.manifest, baselines);
  report["heatmaps"] = write_heatmaps(c, a, true, true);
  write_json(out_path(c, "report.json"), report);
  const auto& d = a.domain;
  std::printf("spectral=%d compressibility=%d physical=%d full=%d margin_criterion=%d\n",
              d.spectral, d.compressibility, d.physical, d.full, d.margin_criterion);
  return 0;
}

int cmd_finetune_cost(const Common& c, const std::string& tuned_manifest) {
  Session s = open_session(c);
  const Manifest tm = read_manifest(tuned_manifest);
  const auto tuned = load_chain(tm, true);
  if (tuned.size() != s.chain.size())
    fail(ErrorKind::kManifest, tuned_manifest + ": lists " + std::to_string(tuned.size()) +
                                   " layers, base lists " + std::to_string(s.chain.size()));
  Json j;
  j["layers"] = Json::array();
  Vec ratio(s.chain.size()), c_base(s.chain.size());
  bool fits = true;
  for (std::size_t k = 0; k < s.chain.size(); ++k) {
    const LayerAnalysis base = analyze_layer(s.chain[k], s.cfg);
    const LayerAnalysis post = analyze_layer(tuned[k], s.cfg);
    Json e;
    e["label"] = base.label;
    fits = fits && base.fit_ok && post.fit_ok;
    if (base.fit_ok && post.fit_ok) {
      ratio(k) = post.fit.scale / base.fit.scale;
      c_base(k) = base.fit.scale;
      e["scale_ratio"] = number(ratio(k));
      e["alpha_shift"] = number(post.fit.alpha - base.fit.alpha);
    }
    if (tuned[k].w.rows() != s.chain[k].w.rows() || tuned[k].w.cols() != s.chain[k].w.cols()) {
      fail(ErrorKind::kDimension, join_path(tm.dir, tm.layers[k].file) + ": offset " +
                                      std::to_string(kOffsetRows) + ": shape differs from base layer");
    }
    e["delta_frob"] = number((tuned[k].w - s.chain[k].w).norm());
    try {
      const RecoveredFrames fr = recover_frames(base.svd, tuned[k].w);
      const FrameRotationCost cost = frame_rotation_cost(base.svd.sigma, fr.q_u, fr.q_v, fr.sigma_post);
      Json f;
      f["orthogonality_defect"] = number(fr.orthogonality_defect);
      f["delta_w"] = number(cost.delta_w);
      f["coherent_cost"] = number(cost.coherent_cost);
      f["uniform_scale"] = number(cost.uniform_scale);
      f["relative_rotation_norm"] = number(cost.relative_rotation_norm);
      f["bound"] = number(cost.bound);
      f["bound_holds"] = cost.bound_holds;
      e["frame_rotation"] = f;
    } catch (const Error& err) {
      e["frame_rotation"] = kNotMeasured;
      e["frame_rotation_error"] = err.what();
    }
    j["layers"].push_back(e);
  }
  if (fits) {
    const ScaleDisruption sd = scale_disruption(ratio, c_base);
    Json e;
    e["d_log"] = number(sd.d_log);
    e["d_ratio"] = number(sd.d_ratio);
    e["variance_form"] = number(sd.variance_form);
    e["max_pair_log"] = number(sd.max_pair_log);
    e["envelope"] = number(sd.envelope);
    e["envelope_holds"] = sd.envelope_holds;
    j["scale_disruption"] = e;
  } else {
    j["scale_disruption"] = kNotMeasured;
  }
  write_json(out_path(c, "finetune_cost.json"), j);
  return 0;
}

struct CapacityArgs {
  std::string activation = "relu";
  int order = kDefaultQuadratureOrder;
  double e0 = 1.0;
  double s = 1.0;
  Index layers = 12;
  double m = 10.0;
  double eta = 1.0;
  double r_out = 64.0;
};

int cmd_capacity(const Common& c, const CapacityArgs& a) {
  const ActivationMoments mo = activation_moments(parse_activation(a.activation), a.order);
  const ScaleBounds sb = scale_bounds(a.e0, a.s, a.layers, a.m, a.eta, mo);
  const WidthBounds wb = width_bounds(a.r_out, mo);
  Json j;
  j["activation"] = mo.activation;
  j["quadrature_order"] = mo.order;
  j["kappa"] = number(mo.kappa);
  j["chi"] = number(mo.chi);
  Json s;
  s["c_typical"] = number(sb.c_typical);
  s["c_coherent"] = number(sb.c_coherent);
  s["c_asymptotic"] = number(sb.c_asymptotic);
  s["asymptotic_ratio"] = number(sb.asymptotic_ratio);
  // The saturated recursions land on M^2 e0 and M at the crossover scales.
  s["energy_at_c_typical"] = number(energy_recursion(a.e0, a.s, a.layers, a.eta, mo.kappa, sb.c_typical));
  s["coherent_at_c_coherent"] = number(coherent_iteration(1.0, mo.chi, sb.c_coherent, a.layers));
  s["conditional_on"] = sb.conditional_on;
  j["scale_bounds"] = s;
  Json w;
  w["coherent"] = wb.coherent;
  w["typical"] = wb.typical;
  w["conditional_on"] = wb.conditional_on;
  j["width_bounds"] = w;
  Json in;
  in["e0"] = number(a.e0);
  in["s"] = number(a.s);
  in["layers"] = a.layers;
  in["M"] = number(a.m);
  in["eta"] = number(a.eta);
  in["r_out"] = number(a.r_out);
  j["inputs"] = in;
  write_json(out_path(c, "capacity.json"), j);
  return 0;
}

int cmd_synth(const Common& c, AlignedChainSpec spec) {
  if (c.seed) spec.seed = *c.seed;
  const auto chain = gen_aligned_chain(spec);
  Manifest m;
  m.name = "synth_aligned_seed" + std::to_string(spec.seed);
  for (const auto& l : chain) {
    const std::string file = l.label + ".gsam";
    write_container(out_path(c, file), l.w);
    m.layers.push_back({file, l.label, "synthetic aligned chain, seed " + std::to_string(spec.seed),
                        "dense matrix, rows = outputs"});
  }
  write_manifest(out_path(c, "manifest.json"), m);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  if (!c.baselines.empty()) {
    cfg.baselines.clear();
    for (const auto& b : c.baselines) cfg.baselines.push_back(parse_baseline(b));
  }
  write_config(out_path(c, "config.json"), cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical GSA certificate toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* fit = app.add_subcommand("fit-spectra", "Power-law fits and effective ranks per layer");
  auto* rank = app.add_subcommand("rank-window", "Effective-rank windows, margins and transfer");
  auto* transport = app.add_subcommand("transport", "Transport matrices and truncation bounds");
  auto* align = app.add_subcommand("align", "Alignment structures, margins and radius");
  auto* energy = app.add_subcommand("block-energy", "Block-energy matrices and screens");
  auto* certify = app.add_subcommand("certify", "Full certificate report with baselines");
  auto* icm = app.add_subcommand("icm", "Invariant channel mapping anatomy");
  auto* finetune = app.add_subcommand("finetune-cost", "Scale disruption and frame rotation cost");
  auto* capacity = app.add_subcommand("capacity", "Activation moments and capacity bounds");
  auto* synth = app.add_subcommand("synth", "Write a synthetic aligned chain fixture");
  for (auto* sub : {fit, rank, transport, align, energy, certify, icm, finetune})
    add_common(sub, common);
  add_common(capacity, common, false);
  add_common(synth, common, false);

  std::string tuned;
  finetune->add_option("--tuned", tuned, "Manifest of the fine-tuned chain")->required();

  CapacityArgs cap;
  capacity->add_option("--activation", cap.activation,
                       "identity|relu|gelu|tanh|swish")->capture_default_str();
  capacity->add_option("--order", cap.order, "Gauss-Hermite order")->capture_default_str();
  capacity->add_option("--e0", cap.e0, "Input energy")->capture_default_str();
  capacity->add_option("--s", cap.s, "Per-layer energy scale")->capture_default_str();
  capacity->add_option("--layers", cap.layers, "Depth L")->capture_default_str();
  capacity->add_option("--M", cap.m, "Global gain budget")->capture_default_str();
  capacity->add_option("--eta", cap.eta, "Alignment efficiency")->capture_default_str();
  capacity->add_option("--r-out", cap.r_out, "Effective output rank")->capture_default_str();

  AlignedChainSpec spec;
  synth->add_option("--ambient", spec.ambient, "Ambient dimension")->capture_default_str();
  synth->add_option("--modes", spec.modes, "Exact rank per layer")->capture_default_str();
  synth->add_option("--layers", spec.layers, "Chain length")->capture_default_str();
  synth->add_option("--alpha", spec.alpha, "Power-law exponent")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*fit) return cmd_fit_spectra(common);
    if (*rank) return cmd_rank_window(common);
    if (*transport) return cmd_transport(common);
    if (*align) return cmd_align(common);
    if (*energy) return cmd_block_energy(common);
    if (*certify) return cmd_certify(common);
    if (*icm) return cmd_icm(common);
    if (*finetune) return cmd_finetune_cost(common, tuned);
    if (*capacity) return cmd_capacity(common, cap);
    if (*synth) return cmd_synth(common, spec);
  } catch (const Error& e) {
    std::fprintf(stderr, "gsa: %s: %s\n", kind_name(e.kind()), e.what());
    return exit_code(e.kind());
  }
  return 1;
}
