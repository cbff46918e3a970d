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

#ifndef GSACERT_CERTIFICATE_H_
#define GSACERT_CERTIFICATE_H_

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsacert/alignment.h"
#include "gsacert/block_energy.h"
#include "gsacert/spectral.h"
#include "gsacert/synth.h"
#include "gsacert/transport.h"

namespace gsacert {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Extraction protocol fixed before any margin is looked at. Unset optional
// values are NaN or empty.
struct ProtocolConfig {
  TransportVariant variant = TransportVariant::kOutTotal;
  bool target_truncated = true;
  double energy_threshold = 0.01;
  Index fixed_rank = 0;  // 0 selects R_eps of the source layer
  double rank_cutoff = kDefaultRankCutoff;
  bool square_embed = false;
  Index fit_lo = 1;
  Index fit_hi = 0;  // 0 selects d_sp

  double theta_row = 1e-8;
  double mu_row = 1e-8;
  std::string partition_file;
  std::vector<int> partition;  // external labels, loaded from partition_file
  SupportRule support{{1}, {}};
  AcceptedGraph accepted;

  std::vector<Index> icm_q{1};
  double tau_st = 0.0;
  double tau_sa = 0.5;

  double zeta = 0.1;
  double gamma0 = 0.0;
  double eps_phys = kNaN;

  double rho = 1.0;
  double eps_noise = kNaN;
  double c_overlap = 0.3;
  double eps_alpha = kNaN;
  double eps_c = kNaN;
  double jacobian_bound = kNaN;
  double interval_lo = kNaN;
  double interval_hi = kNaN;
  Index window_alt = 0;  // 0 skips the window-robustness diagnostic

  std::uint64_t seed = 0;
  std::vector<Baseline> baselines;
};

struct LayerAnalysis {
  std::string label;
  GaugedSvd svd;
  Vec sigma_normalized;  // Frobenius-normalized to d_sp
  CartanFit fit;
  Index r_eps = 0;
  bool fit_ok = false;
  std::string fit_error;
};

struct BridgeReport {
  double rank_lhs = 0.0;
  double rank_margin = 0.0;
  bool rank_ok = false;
  double residual = 0.0;  // ||T - (core + overlap)||_F
  double residual_bound = 0.0;  // E_tr + ||noise||_F
  bool residual_ok = false;
  double e_tr = 0.0;
  double r_cert = 0.0;
  bool radius_ok = false;
  bool reextraction_identical = false;
  bool certified = false;
};

struct AlignmentResidual {
  double zeta = 0.0;
  double gamma0 = 0.0;
  double j = 0.0;
  double noise_term = 0.0;
  double pair_term = 0.0;
  double gap_term = 0.0;
  double m_star = kInf;
  double eps_phys = 0.0;
  double c_overlap = kNaN;
  bool implication_applies = false;
};

AlignmentResidual alignment_residual(const CoreOverlapNoise& con, const ActiveSets& active,
                                     const std::vector<PairMargin>& pairs, double zeta,
                                     double gamma0, double eps_phys = kNaN);

struct InterfaceAnalysis {
  Index k = 0;
  Index window = 0;
  Index d_sp = 0;
  InterfaceBudget budget;
  TransportMatrix transport;
  TruncationError truncation;
  RowPartition rows;
  AlignmentStructure structure;
  std::vector<PairMargin> pairs;
  CoreOverlapNoise con;
  Incidence inc;
  CertificateRadius radius;
  StabilityVerdict stability;
  BlockEnergyMatrix energy;
  BadMassReport bad;
  ScreenReport screen;
  IcmAnatomy icm;
  IcmDeltas icm_deltas;
  IcmStability icm_stability;
  RankTransfer rank_transfer;         // measured displacement
  RankTransfer budget_rank_transfer;  // Cartan-budget displacement
  BridgeReport bridge;
  AlignmentResidual residual;
  std::optional<WindowRobustness> window_check;
  std::map<std::string, std::string> not_measured;  // stage -> reason
  bool measured(const std::string& stage) const { return !not_measured.count(stage); }
};

struct GsaResidual {
  double d_spec = 0.0;
  double d_noise = 0.0;
  double d_pair = 0.0;
  double total = 0.0;
  double bound = 0.0;
  bool bound_holds = false;
  std::vector<double> noise;  // per interface
  std::vector<double> pair;   // per interface
};

GsaResidual gsa_residual(const std::vector<CartanFit>& fits,
                         const std::vector<InterfaceBudget>& budgets,
                         const std::vector<double>& noise_norms,
                         const std::vector<std::vector<PairMargin>>& pairs, double slope_min,
                         double eps_noise);

struct DomainCheck {
  std::string domain;
  std::string name;
  double lhs = kNaN;
  double rhs = kNaN;
  bool measured = true;
  bool holds = false;
};

struct DomainVerdict {
  bool spectral = false;
  bool compressibility = false;
  bool physical = false;
  bool full = false;
  bool margin_criterion = false;
  double eps_alpha = kNaN;
  double eps_c = kNaN;
  double static_proxy = kNaN;
  std::vector<DomainCheck> checks;
};

struct ChainAnalysis {
  std::string name;
  Index d = 0;  // spectral length shared by the chain (minimum d_sp)
  std::vector<LayerAnalysis> layers;
  std::vector<InterfaceAnalysis> interfaces;
  Interval interval;
  TvBoundReport tv;
  bool tv_measured = false;
  GsaResidual residual;
  DomainVerdict domain;
};

LayerAnalysis analyze_layer(const LayerMatrix& layer, const ProtocolConfig& cfg);

// Static proxy ||W_{L-1} ... W_0||_2 for the Jacobian bound.
double static_jacobian_proxy(const std::vector<LayerMatrix>& chain);

ChainAnalysis analyze_chain(const std::vector<LayerMatrix>& chain, const ProtocolConfig& cfg,
                            int threads = 1, const std::string& name = "chain");

DomainVerdict domain_membership(const ChainAnalysis& a, const ProtocolConfig& cfg,
                                double static_proxy);

// Incidence-preserving comparison between a truncated structure and the full
// transport.
BridgeReport bridge_check(const GaugedSvd& svd_k, const GaugedSvd& svd_k1, const Mat& m_hat,
                          const AlignmentStructure& s, const CoreOverlapNoise& con,
                          const CertificateRadius& radius, const RankTransfer& rank, Index r);

struct CoarseView {
  std::string name;
  Mat m;
  std::vector<Index> pi_r;
  std::vector<Index> pi_c;
};

struct FamilyViewResult {
  std::string name;
  double eta = 0.0;
  bool gaps_ok = false;
  bool pairs_ok = false;
  bool certified = false;
  bool identical = false;
  double e_max_diff = 0.0;
  double e_bound = kNaN;
  bool e_bound_holds = false;
};

struct FamilyReport {
  std::vector<FamilyViewResult> views;
  std::vector<std::string> persistent;  // certified views with identical incidence
  std::vector<std::string> flagged;     // views beyond a gap condition
  bool persistence_holds = true;        // certified => identical
  std::vector<std::pair<std::string, CoarseningReport>> coarse;
};

FamilyReport family_check(const Mat& reference, const AlignmentStructure& s,
                          const std::vector<std::pair<std::string, Mat>>& views,
                          const AcceptedGraph& accepted,
                          const std::vector<CoarseView>& coarse_views = {});

// Active sets made disjoint by assigning shared columns to the lowest group.
IndexSets disjoint_bins(const AlignmentStructure& s);

}  // namespace gsacert

#endif  // GSACERT_CERTIFICATE_H_
