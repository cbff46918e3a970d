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

// Property-based acceptance suite. One line per criterion, nonzero exit on
// any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "gsacert/alignment.h"
#include "gsacert/block_energy.h"
#include "gsacert/capacity.h"
#include "gsacert/certificate.h"
#include "gsacert/config.h"
#include "gsacert/container.h"
#include "gsacert/errors.h"
#include "gsacert/finetune.h"
#include "gsacert/json_out.h"
#include "gsacert/report.h"
#include "gsacert/spectral.h"
#include "gsacert/synth.h"
#include "gsacert/transport.h"

namespace gsacert {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
  void note(const std::string& what) {
    if (pass) detail << what << "; ";
  }
};

using Criterion = std::function<void(Outcome&)>;

bool run(int id, const char* name, double limit_s, const Criterion& fn) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && s > limit_s) {
    std::ostringstream w;
    w << "runtime " << s << " s over limit " << limit_s << " s";
    o.check(false, w.str());
  }
  std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, s,
              o.detail.str().empty() ? "" : "  ", o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

void cartan_rigidity(Outcome& o) {
  std::uniform_real_distribution<double> ua(0.8, 1.6);
  const Interval interval{0.8, 1.6};
  for (int c = 0; c < 100; ++c) {
    Rng rng(1000 + c);
    SynthChainSpec spec;
    spec.d = 64;
    spec.seed = 2000 + c;
    spec.chained_frames = true;
    for (int k = 0; k < 8; ++k) spec.alpha.push_back(ua(rng));
    const auto chain = gen_power_law_chain(spec);
    std::vector<CartanFit> fits;
    std::vector<InterfaceBudget> budgets;
    for (size_t k = 0; k < chain.size(); ++k) {
      fits.push_back(fit_power_law(singular_values(chain[k].w)));
      o.check(std::abs(fits.back().alpha - spec.alpha[k]) <= 1e-8, "fit recovery, chain " + std::to_string(c));
    }
    for (size_t k = 0; k + 1 < chain.size(); ++k)
      budgets.push_back(interface_budget(chain[k].w, chain[k + 1].w));
    const TvBoundReport r = cartan_tv_bound(fits, budgets, interval, spec.d);
    o.check(r.applicable, "hypotheses, chain " + std::to_string(c));
    o.check(r.measured <= r.robust_bound, "robust TV bound, chain " + std::to_string(c));
  }
}

void effective_rank_machinery(Outcome& o) {
  const std::vector<double> alphas = {0.3, 0.5, 0.55, 0.7, 0.9, 1.0, 1.2, 1.5, 2.0, 3.0};
  for (Index d = 1; d <= 256; ++d)
    for (double a : alphas)
      for (double eps : {0.5, 0.25, 0.1}) {
        const std::string tag = "d=" + std::to_string(d) + " alpha=" + std::to_string(a);
        const Index oracle = exhaustive_effective_rank(gibbs_weights(d, a), eps);
        const Index emp = empirical_effective_rank(power_law_spectrum(d, a), eps);
        o.check(effective_rank(d, a, eps) == oracle, "model rank vs scan, " + tag);
        o.check(emp == oracle, "empirical rank vs scan, " + tag);
        // The integral sandwich is stated for exponents above one half.
        if (a > 0.5) {
          const RankBounds b = model_rank_bounds(d, a, eps);
          o.check(b.lower <= emp && emp <= b.upper, "rank sandwich, " + tag);
        }
      }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.1, 3.0);
  for (int t = 0; t < 10000; ++t) {
    const Index d = 2 + rng() % 255;
    const Index r = rng() % (d + 1);
    const double a = ua(rng), b = ua(rng);
    const double lhs = std::abs(tail_mass(d, a, r) - tail_mass(d, b, r));
    o.check(lhs <= 2.0 * std::log(static_cast<double>(d)) * std::abs(a - b) + 1e-15,
            "tail Lipschitz bound, sample " + std::to_string(t));
  }
}

void truncation_bounds(Outcome& o) {
  Rng rng(11);
  std::uniform_real_distribution<double> ua(0.5, 1.8);
  for (int t = 0; t < 1000; ++t) {
    GaugedSvd sk, sk1;
    Index n;
    if (t % 2 == 0) {
      n = 2 + rng() % 15;
      sk = gauged_svd(gaussian_matrix(n, n, rng));
      sk1 = gauged_svd(gaussian_matrix(n, n, rng));
    } else {
      SynthChainSpec spec;
      spec.d = n = 8 + rng() % 40;
      spec.alpha = {ua(rng), ua(rng)};
      spec.seed = 3000 + t;
      const auto chain = gen_power_law_chain(spec);
      sk = gauged_svd(chain[0].w);
      sk1 = gauged_svd(chain[1].w);
    }
    const Index rs = 1 + rng() % n, rt = 1 + rng() % n;
    const TruncationError e = truncation_error(sk, sk1, rs, rt);
    o.check(e.measured <= e.bound * (1 + 1e-12) + 1e-12, "interface " + std::to_string(t));
  }
  // Tight instance: the full source tail lands on a single retained target mode.
  Mat wk = Mat::Zero(3, 3), wk1 = Mat::Identity(3, 3);
  wk(0, 0) = 2.0;
  wk(1, 1) = 0.3;
  wk(2, 2) = 0.1;
  const TruncationError tight =
      truncation_error(gauged_svd(wk), gauged_svd(wk1), 1, 3);
  o.check(std::abs(tight.measured - tight.bound) <= 1e-9, "tight instance equality");
  o.check(std::abs(tight.bound - std::sqrt(0.09 + 0.01)) <= 1e-9, "tight instance value");
}

void decomposition_exactness(Outcome& o) {
  Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    SynthStructureSpec spec;
    spec.groups = 2 + t % 4;
    spec.rows_per_group = 2 + t % 3;
    spec.shared = t % 5 != 0;
    spec.o = 0.05 + 0.1 * (t % 3);
    spec.noise = 0.01 * (t % 7);
    spec.noise_rows = t % 3;
    spec.extra_cols = t % 4;
    spec.seed = 4000 + t;
    const PlantedStructure p = gen_structured_transport(spec);
    const AlignmentStructure s = extract_structure(p.m, p.rows, SupportRule{p.sizes, {}});
    const CoreOverlapNoise c = decompose(p.m, s);
    const std::string tag = "structure " + std::to_string(t);
    const double total = p.m.squaredNorm();
    o.check((c.core + c.overlap + c.noise - p.m).norm() <= 1e-9 * std::sqrt(total), "reconstruction, " + tag);
    const double parts = c.core.squaredNorm() + c.overlap.squaredNorm() + c.noise.squaredNorm();
    o.check(std::abs(total - parts) <= 1e-9 * std::max(total, 1e-300), "Pythagorean identity, " + tag);
    // Orthogonal projection onto the core/overlap mask leaves exactly the noise.
    Mat proj = p.m;
    for (Index i = 0; i < p.m.rows(); ++i)
      for (Index j = 0; j < p.m.cols(); ++j)
        if (c.mask(i, j) == static_cast<int>(MaskLabel::kNoise)) proj(i, j) = 0.0;
    const double dist = (p.m - proj).norm();
    o.check(std::abs(dist - c.noise_frob) <= 1e-9 * std::max(1.0, c.noise_frob), "projection distance, " + tag);
    // No other mask-supported candidate is closer.
    for (int k = 0; k < 5; ++k) {
      Mat cand = proj + 0.1 * gaussian_matrix(p.m.rows(), p.m.cols(), rng);
      for (Index i = 0; i < p.m.rows(); ++i)
        for (Index j = 0; j < p.m.cols(); ++j)
          if (c.mask(i, j) == static_cast<int>(MaskLabel::kNoise)) cand(i, j) = 0.0;
      o.check((p.m - cand).norm() >= dist - 1e-12, "projection minimality, " + tag);
    }
  }
}

void calibration_and_screens(Outcome& o) {
  // Two single-row groups with dedicated columns 0, 1 and a shared column 2:
  // m is the dedicated entry, o the norm of the shared column.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RowPartition rows = partition_from_labels({1, 2});
  const SupportRule rule{{2}, {}};
  int counter = 0;
  for (int t = 0; t < 100000; ++t) {
    const double m = 0.01 + 2.0 * u(rng);
    // Every tenth sample sits on the boundary o = m/3.
    const double o_target = t % 10 == 0 ? m / 3.0 : 0.9 * m * u(rng);
    Mat mat = Mat::Zero(2, 3);
    mat(0, 0) = m;
    mat(1, 1) = m;
    mat(0, 2) = mat(1, 2) = std::max(o_target, 1e-6) / std::sqrt(2.0);
    const AlignmentStructure s = extract_structure(mat, rows, rule);
    for (const auto& p : pairwise_margins(mat, s))
      if (p.nondegenerate && p.one_third_holds != p.half_gap_holds) ++counter;
  }
  o.check(counter == 0, std::to_string(counter) + " calibration counterexamples");

  int screened = 0, violations = 0;
  for (int t = 0; t < 10000; ++t) {
    SynthStructureSpec spec;
    spec.groups = 2 + t % 3;
    spec.m = 0.5 + u(rng);
    spec.o = spec.m * (0.05 + 0.55 * u(rng));
    spec.noise = 0.05 * u(rng);
    spec.noise_rows = t % 2;
    spec.seed = 5000 + t;
    const PlantedStructure p = gen_structured_transport(spec);
    const AlignmentStructure s = extract_structure(p.m, p.rows, SupportRule{p.sizes, {}});
    // The screen is stated for pairs with a positive exclusive core.
    std::vector<PairMargin> pairs;
    for (const auto& pm : pairwise_margins(p.m, s))
      if (pm.nondegenerate) pairs.push_back(pm);
    const BlockEnergyMatrix e = block_energy(p.m, s.rows.groups, s.active.sets);
    const ScreenReport r = margin_screen(e, pairs);
    for (const auto& sp : r.pairs) {
      if (!(sp.h < 1.0)) continue;
      ++screened;
      for (const auto& pm : pairs)
        if (pm.i == sp.i && pm.j == sp.j && !(3.0 * pm.o < pm.m)) ++violations;
    }
  }
  o.check(screened > 0, "no screened pairs");
  o.check(violations == 0, std::to_string(violations) + " screen counterexamples");
  o.note(std::to_string(screened) + " screened pairs");
}

void single_radius_stability(Outcome& o) {
  Rng rng(41);
  int identical = 0;
  for (int t = 0; t < 500; ++t) {
    SynthStructureSpec spec;
    spec.groups = 2 + t % 4;
    spec.o = 0.05 + 0.05 * (t % 5);
    spec.noise = 0.02 * (t % 3);
    spec.noise_rows = t % 2;
    spec.extra_cols = t % 3;
    spec.seed = 6000 + t;
    const PlantedStructure p = gen_structured_transport(spec);
    const AlignmentStructure s = extract_structure(p.m, p.rows, SupportRule{p.sizes, {}});
    const auto pairs = pairwise_margins(p.m, s);
    const CertificateRadius r = certificate_radius(p.m, s, pairs);
    if (!r.margins_positive || !(r.r_cert > 0)) {
      o.check(false, "planted structure " + std::to_string(t) + " has no positive radius");
      continue;
    }
    Mat e = gaussian_matrix(p.m.rows(), p.m.cols(), rng);
    const double target = r.r_cert == kInf ? 1.0 : 0.99 * r.r_cert;
    e *= target / e.norm();
    const AlignmentStructure s2 = reextract(p.m + e, s);
    if (incidence_signature(p.m, s) == incidence_signature(p.m + e, s2)) ++identical;
  }
  o.check(identical == 500, std::to_string(identical) + "/500 identical");
}

void bridge_and_icm(Outcome& o) {
  int bridged = 0;
  for (int t = 0; t < 20; ++t) {
    AlignedChainSpec spec;
    spec.seed = 7000 + t;
    const auto chain = gen_aligned_chain(spec);
    const ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
    const ChainAnalysis a = analyze_chain(chain, cfg);
    for (const auto& ia : a.interfaces) {
      if (!ia.measured("alignment")) {
        o.check(false, "alignment not measured, seed " + std::to_string(spec.seed));
        continue;
      }
      // Add a flat tail sized so the truncation error sits at a fraction of r_cert.
      const double frac = 0.1 + 0.08 * (t % 10);
      const Index r = spec.modes;
      const GaugedSvd& sk = a.layers[ia.k].svd;
      const GaugedSvd& sk1 = a.layers[ia.k + 1].svd;
      const double tau = frac * ia.radius.r_cert /
                         (std::sqrt(static_cast<double>(spec.ambient - r)) * (sk.op_norm() + sk1.op_norm()));
      auto tailed = [&](const GaugedSvd& s) {
        Vec sig = s.sigma;
        for (Index i = r; i < sig.size(); ++i) sig(i) = tau;
        return gauged_svd(Mat(s.u * sig.asDiagonal() * s.v.transpose()));
      };
      const GaugedSvd tk = tailed(sk), tk1 = tailed(sk1);
      const Mat m_hat = build_transport(tk, tk1, cfg.variant, r, r, cfg.target_truncated).entries;
      const AlignmentStructure s = extract_structure(m_hat, ia.rows, cfg.support);
      const auto pairs = pairwise_margins(m_hat, s);
      const CoreOverlapNoise con = decompose(m_hat, s);
      const CertificateRadius rad = certificate_radius(m_hat, s, pairs);
      RankTransfer rank;
      rank.certified = true;
      const BridgeReport b = bridge_check(tk, tk1, m_hat, s, con, rad, rank, r);
      if (!(b.e_tr < b.r_cert)) continue;
      ++bridged;
      o.check(b.residual_ok, "bridge residual bound, seed " + std::to_string(spec.seed));
      o.check(b.reextraction_identical, "bridge incidence, seed " + std::to_string(spec.seed));
    }
  }
  o.check(bridged > 0, "no interface with E_tr < r_cert");
  o.note(std::to_string(bridged) + " bridged interfaces");

  // ICM labels under core perturbations whose row-energy and correlation
  // shifts stay below the SC/ST/SA margins.
  Rng rng(42);
  int stable_trials = 0;
  for (int t = 0; t < 2000; ++t) {
    const Index rows = 3 + t % 5;
    const Mat m = gaussian_matrix(rows, 4, rng);
    const AlignmentStructure s =
        extract_structure(m, partition_from_labels(std::vector<int>(rows, 1)), SupportRule{{4}, {}});
    const IcmThresholds th{{2}, 0.5 * m.squaredNorm() / rows, 0.5};
    const IcmAnatomy a = icm_extract(decompose(m, s), s, th, "channel");
    const double eta = std::pow(10.0, -1.0 - static_cast<double>(t % 4)) * m.norm();
    const IcmDeltas dl = icm_deltas(a, eta);
    if (!icm_stability(a, dl.delta_row, dl.delta_corr).stable) continue;
    ++stable_trials;
    Mat e = gaussian_matrix(rows, 4, rng);
    e *= eta / e.norm();
    const IcmAnatomy b = icm_extract(decompose(m + e, s), s, th, "channel");
    const IcmGroup& g = a.groups[0];
    const std::string tag = "ICM trial " + std::to_string(t);
    o.check(b.groups[0].sc == g.sc, "SC labels, " + tag);
    o.check(b.groups[0].st == g.st, "ST labels, " + tag);
    o.check(b.groups[0].sa == g.sa, "SA labels, " + tag);
    o.check(b.groups[0].srs == g.srs, "SRS, " + tag);
  }
  o.check(stable_trials > 0, "no certified ICM trials");
  o.note(std::to_string(stable_trials) + " certified ICM trials");
}

void block_energy_algebra(Outcome& o) {
  Rng rng(51);
  std::uniform_real_distribution<double> uw(0.5, 2.0);
  const IndexSets g = {{0}, {1, 2}, {3}, {4, 5}};
  const IndexSets c = {{0, 1}, {2}, {3, 4}, {5}};
  for (int t = 0; t < 1000; ++t) {
    const Mat a = gaussian_matrix(6, 6, rng);
    const std::string tag = "trial " + std::to_string(t);
    const CoarseningReport cr = coarsen(a, g, c, {0, 0, 1, 1}, {0, 1, 1, 0}, {{1}, {0}, {3}, {2}});
    o.check(cr.max_formula_error <= 1e-12, "coarsening formula, " + tag);
    o.check(cr.k1 && cr.k2 && cr.k3, "coarsening inequalities, " + tag);
    Vec dr(6), dc(6);
    for (Index i = 0; i < 6; ++i) {
      dr(i) = uw(rng);
      dc(i) = uw(rng);
    }
    const ScaleTransferReport st = scale_transfer(a, dr, dc, g, g, {});
    o.check(st.sandwich_holds && st.bad_transfer_holds && st.zero_support_preserved,
            "scale transfer, " + tag);
    const Mat l = Mat::Identity(6, 6) + 0.2 * gaussian_matrix(6, 6, rng);
    o.check(row_leakage(a, l, g, {{0, 1, 2}, {2, 3}, {4}, {5}}, {{1}, {}, {}, {}}).holds,
            "leakage, " + tag);
  }
  std::uniform_real_distribution<double> ua(0.6, 1.6);
  for (int t = 0; t < 1000; ++t) {
    SynthChainSpec spec;
    spec.d = 12 + rng() % 20;
    spec.alpha = {ua(rng), ua(rng)};
    spec.seed = 8000 + t;
    const auto chain = gen_power_law_chain(spec);
    const GaugedSvd sk = gauged_svd(chain[0].w), sk1 = gauged_svd(chain[1].w);
    const Index r = 4 + rng() % (spec.d - 4);
    const Index r_alt = 4 + rng() % (spec.d - 4);
    const Index lo = std::min(r, r_alt);
    // Row groups and column sets drawn inside the smaller window.
    IndexSets groups(2), cols(2);
    for (Index i = 0; i < lo; ++i) groups[i % 2].push_back(i);
    for (Index j = 0; j < lo; ++j) cols[rng() % 2].push_back(j);
    if (cols[0].empty()) cols[0].push_back(0);
    if (cols[1].empty()) cols[1].push_back(lo - 1);
    for (auto& cs : cols) std::sort(cs.begin(), cs.end());
    const WindowRobustness w = window_robustness(sk, sk1, r, r_alt, groups, cols);
    const std::string tag = "window trial " + std::to_string(t);
    o.check(w.delta_measured <= w.delta_bound + 1e-12, "window distance, " + tag);
    o.check(w.check.holds, "entrywise bound, " + tag);
  }
}

void capacity_and_finetune(Outcome& o) {
  const ActivationMoments relu = activation_moments(parse_activation("relu"));
  o.check(std::abs(relu.kappa - 0.5) <= 1e-8, "relu kappa");
  o.check(std::abs(relu.chi - 0.5) <= 1e-8, "relu chi");
  for (const char* act : {"relu", "tanh", "gelu", "identity"}) {
    const ActivationMoments mo = activation_moments(parse_activation(act), 64);
    for (double m : {1.5, 3.0, 10.0})
      for (Index l : {1, 4, 12, 48}) {
        const double e0 = 1.7, s = 0.6, eta = 0.9;
        const ScaleBounds b = scale_bounds(e0, s, l, m, eta, mo);
        const std::string tag = std::string(act) + " M=" + std::to_string(m) + " L=" + std::to_string(l);
        o.check(rel(energy_recursion(e0, s, l, eta, mo.kappa, b.c_typical), m * m * e0) <= 1e-8,
                "energy crossover, " + tag);
        o.check(rel(coherent_iteration(1.0, mo.chi, b.c_coherent, l), m) <= 1e-8,
                "coherent crossover, " + tag);
      }
  }
  Rng rng(61);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const Index n = 2 + rng() % 12;
    Vec s(n), c(n);
    for (Index i = 0; i < n; ++i) {
      s(i) = u(rng);
      c(i) = u(rng);
    }
    const ScaleDisruption d = scale_disruption(s, c);
    o.check(rel(d.d_log, d.variance_form) <= 1e-9, "variance identity, trial " + std::to_string(t));
    const Index dim = 2 + rng() % 8;
    Vec sigma(dim);
    for (Index i = 0; i < dim; ++i) sigma(i) = u(rng);
    const double scale = u(rng);
    const Mat q = random_orthogonal(dim, rng);
    const double direct =
        (q * (scale * sigma).asDiagonal() * q.transpose() - Mat(sigma.asDiagonal())).squaredNorm();
    o.check(std::abs(coherent_double_sum(sigma, q, scale) - direct) <= 1e-9 * std::max(1.0, direct),
            "rotation double sum, trial " + std::to_string(t));
  }
}

void end_to_end(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gsacert_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  AlignedChainSpec spec;
  spec.seed = 20260101;
  const auto generated = gen_aligned_chain(spec);
  Manifest m;
  m.name = "acceptance";
  for (const auto& l : generated) {
    write_container((dir / (l.label + ".gsam")).string(), l.w);
    m.layers.push_back({l.label + ".gsam", l.label, "synthetic", "dense"});
  }
  write_manifest((dir / "manifest.json").string(), m);
  write_config((dir / "config.json").string(), aligned_chain_protocol(spec, generated));

  const Manifest manifest = read_manifest((dir / "manifest.json").string());
  const ProtocolConfig cfg = read_config((dir / "config.json").string());
  const auto chain = load_chain(manifest, cfg.square_embed);
  const ChainAnalysis a = analyze_chain(chain, cfg, 2);
  const auto baselines = run_baselines(chain, cfg, 2);
  const Json report = make_report(a, cfg, &manifest, baselines);
  const std::string text = dump_json(report);
  o.check(text == dump_json(make_report(analyze_chain(chain, cfg, 1), cfg, &manifest,
                                        run_baselines(chain, cfg, 1))),
          "report not byte-stable across thread counts");

  for (const char* v : {"spectral", "compressibility", "physical", "full", "margin_criterion"})
    o.check(report["domain"][v] == true, std::string("domain verdict ") + v);
  const Json& rows = report["certificate_entries"];
  o.check(rows.is_array() && rows.size() + 1 == chain.size(), "one entry row per interface");
  for (const auto& row : rows) {
    for (const auto& [key, value] : row.items())
      o.check(!value.is_null() && value != Json(kNotMeasured), "entry populated: " + key);
    for (const char* v : {"rank_stability_holds", "e_tr_below_r_cert", "gap_condition_holds",
                          "one_third_holds", "noise_holds"})
      o.check(row[v] == true, std::string("entry verdict ") + v);
  }
  bool gaussian = false;
  for (const auto& b : report["baselines"]) {
    if (b["baseline"] != "gaussian") continue;
    gaussian = true;
    // Recorded only; the margin values themselves are not asserted.
    o.check(b["ran"] == true && b["verdicts"]["physical"] == false, "gaussian physical verdict");
  }
  o.check(gaussian, "gaussian baseline missing");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace gsacert

int main() {
  using namespace gsacert;
  bool ok = true;
  const auto t0 = std::chrono::steady_clock::now();
  ok &= run(1, "Cartan rigidity on 100 synthetic chains", 10.0, cartan_rigidity);
  ok &= run(2, "effective-rank oracle, sandwich and Lipschitz", 5.0, effective_rank_machinery);
  ok &= run(3, "truncation bound on 1000 interfaces plus tight instance", 20.0, truncation_bounds);
  ok &= run(4, "core/overlap/noise exactness and projection distance", 0.0, decomposition_exactness);
  ok &= run(5, "one-third calibration and block-energy screen", 0.0, calibration_and_screens);
  ok &= run(6, "single-radius stability on 500 planted structures", 60.0, single_radius_stability);
  ok &= run(7, "bridge incidence and ICM label stability", 0.0, bridge_and_icm);
  ok &= run(8, "coarsening, scale transfer, leakage, window robustness", 0.0, block_energy_algebra);
  ok &= run(9, "activation moments, crossovers, fine-tuning identities", 0.0, capacity_and_finetune);
  ok &= run(10, "synth to certify end to end", 0.0, end_to_end);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = total < 120.0;
  std::printf("total %.2f s (limit 120 s)%s\n", total, in_time ? "" : "  over limit");
  return ok && in_time ? 0 : 1;
}
