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

#include <random>

#include <gtest/gtest.h>

#include "gsacert/config.h"
#include "gsacert/errors.h"
#include "gsacert/synth.h"

namespace gsacert {
namespace {

PairMargin make_pair(double m, double o) {
  PairMargin p;
  p.j = 1;
  p.m = m;
  p.o = o;
  p.nondegenerate = m > 0;
  return p;
}

Mat shared_column_instance() {
  Mat m(4, 3);
  m << 1, 0, 0.1, 1, 0, 0.1, 0, 2, 0.1, 0, 2, 0.1;
  return m;
}

AlignmentStructure two_groups(const Mat& m) {
  return extract_structure(m, partition_from_labels({1, 1, 2, 2}), SupportRule{{2}, {}});
}

std::vector<CartanFit> exact_fits(Index d, std::vector<double> alphas) {
  std::vector<CartanFit> out;
  for (double a : alphas) out.push_back(fit_power_law(power_law_spectrum(d, a)));
  return out;
}

TEST(GsaResidual, CleanConstantChain) {
  auto fits = exact_fits(32, {1.1, 1.1, 1.1});
  std::vector<InterfaceBudget> budgets(2, interface_budget_from_norms(1, 1, 1));
  std::vector<std::vector<PairMargin>> pairs = {{make_pair(1, 0.1)}, {}};
  GsaResidual r = gsa_residual(fits, budgets, {0.0, 0.0}, pairs, slope(32, 1.1), 0.0);
  EXPECT_NEAR(r.d_spec, 0.0, 1e-9);
  EXPECT_EQ(r.d_pair, 0.0);
  EXPECT_EQ(r.d_noise, 0.0);
}

TEST(GsaResidual, OneViolatingPair) {
  auto fits = exact_fits(32, {1.1, 1.1});
  std::vector<InterfaceBudget> budgets(1, interface_budget_from_norms(1, 1, 1));
  GsaResidual r = gsa_residual(fits, budgets, {0.0}, {{make_pair(1, 0.4)}}, slope(32, 1.1), 0.0);
  EXPECT_NEAR(r.d_pair, 0.2, 1e-15);
  EXPECT_NEAR(r.pair[0], 0.2, 1e-15);
}

TEST(GsaResidual, SubThirdOverlapsContributeNothing) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto fits = exact_fits(16, {1.0, 1.0});
  std::vector<InterfaceBudget> budgets(1, interface_budget_from_norms(1, 1, 1));
  for (int t = 0; t < 100; ++t) {
    const double m = u(rng);
    const double c = 0.33 * u(rng);
    GsaResidual r =
        gsa_residual(fits, budgets, {0.0}, {{make_pair(m, c * m)}}, slope(16, 1.0), 0.0);
    EXPECT_EQ(r.d_pair, 0.0);
  }
}

TEST(GsaResidual, DegeneratePairsIgnored) {
  auto fits = exact_fits(16, {1.0, 1.0});
  std::vector<InterfaceBudget> budgets(1, interface_budget_from_norms(1, 1, 1));
  GsaResidual r = gsa_residual(fits, budgets, {0.0}, {{make_pair(0, 0.4)}}, slope(16, 1.0), 0.0);
  EXPECT_EQ(r.d_pair, 0.0);
}

TEST(GsaResidual, MissingInterfaceData) {
  auto fits = exact_fits(16, {1.0, 1.0});
  std::vector<InterfaceBudget> budgets(1, interface_budget_from_norms(1, 1, 1));
  EXPECT_THROW(gsa_residual(fits, budgets, {}, {{}}, 1.0, 0.0), Error);
}

TEST(AlignmentResidual, SatisfiedStructureIsZero) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  auto pairs = pairwise_margins(m, s);
  AlignmentResidual r = alignment_residual(decompose(m, s), s.active, pairs, 0.1, 0.0);
  EXPECT_EQ(r.j, 0.0);
  EXPECT_NEAR(r.m_star, std::sqrt(2.0), 1e-12);
}

TEST(AlignmentResidual, CalibratedOverlapConstant) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  auto pairs = pairwise_margins(m, s);
  const double zeta = 0.1;
  const double m_star = pairs[0].m;
  AlignmentResidual r =
      alignment_residual(decompose(m, s), s.active, pairs, zeta, 0.0, 0.5 * zeta * m_star);
  ASSERT_TRUE(r.implication_applies);
  EXPECT_NEAR(r.c_overlap, (1 - 0.5 * zeta) / 3, 1e-15);
  EXPECT_LT(r.c_overlap, 1.0 / 3.0);
}

TEST(AlignmentResidual, GapShortfallSquared) {
  Mat m(1, 3);
  m << 3, 1, 2;  // gap 3
  AlignmentStructure s = extract_structure(m, partition_from_labels({1}), SupportRule{{2}, {}});
  AlignmentResidual r = alignment_residual(decompose(m, s), s.active, {}, 0.1, 3.1);
  EXPECT_NEAR(r.gap_term, 0.01, 1e-14);
  EXPECT_NEAR(r.j, 0.01 + r.noise_term, 1e-14);
}

TEST(PairBoundary, OneThirdIsStrict) {
  // Cores 3I on both groups; a shared column of norm exactly one.
  Mat m = Mat::Zero(4, 5);
  m.block(0, 0, 2, 2) = 3 * Mat::Identity(2, 2);
  m.block(2, 2, 2, 2) = 3 * Mat::Identity(2, 2);
  m.col(4).setConstant(0.5);
  AlignmentStructure s =
      extract_structure(m, partition_from_labels({1, 1, 2, 2}), SupportRule{{3}, {}});
  auto pairs = pairwise_margins(m, s);
  ASSERT_EQ(pairs.size(), 1u);
  ASSERT_EQ(pairs[0].m, 3.0);
  ASSERT_EQ(pairs[0].o, 1.0);
  EXPECT_FALSE(pairs[0].one_third_holds);
  EXPECT_EQ(pairs[0].slack, 0.0);
  CertificateRadius r = certificate_radius(m, s, pairs);
  EXPECT_EQ(r.r_cert, 0.0);
  EXPECT_FALSE(r.margins_positive);
}

TEST(StaticProxy, ProductNorm) {
  std::vector<LayerMatrix> chain(2);
  chain[0].w = Vec((Vec(2) << 2, 1).finished()).asDiagonal();
  chain[1].w = Vec((Vec(2) << 1, 3).finished()).asDiagonal();
  EXPECT_NEAR(static_jacobian_proxy(chain), 3.0, 1e-15);
}

struct AlignedInterface {
  GaugedSvd sk, sk1;
  Mat m_hat;
  AlignmentStructure s;
  std::vector<PairMargin> pairs;
  CoreOverlapNoise con;
  CertificateRadius radius;
};

AlignedInterface aligned_interface(const std::vector<LayerMatrix>& chain, const ProtocolConfig& cfg,
                                   Index r) {
  AlignedInterface a;
  a.sk = gauged_svd(chain[0].w);
  a.sk1 = gauged_svd(chain[1].w);
  a.m_hat = build_transport(a.sk, a.sk1, TransportVariant::kOutTotal, r, r, true).entries;
  Mat y = a.sk1.u.leftCols(r) * a.sk1.sigma.head(r).asDiagonal();
  RowPartition rows = mode_profile_partition(y, cfg.theta_row, cfg.mu_row);
  a.s = extract_structure(a.m_hat, rows, cfg.support);
  a.pairs = pairwise_margins(a.m_hat, a.s);
  a.con = decompose(a.m_hat, a.s);
  a.radius = certificate_radius(a.m_hat, a.s, a.pairs);
  return a;
}

std::vector<LayerMatrix> with_tail(const std::vector<LayerMatrix>& chain, Index r, double tau) {
  std::vector<LayerMatrix> out = chain;
  for (auto& l : out) {
    GaugedSvd s = gauged_svd(l.w);
    Vec sig = s.sigma;
    for (Index i = r; i < sig.size(); ++i) sig(i) = tau;
    l.w = s.u * sig.asDiagonal() * s.v.transpose();
  }
  return out;
}

TEST(Bridge, ExactRankEquality) {
  AlignedChainSpec spec;
  spec.seed = 3;
  auto chain = gen_aligned_chain(spec);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  AlignedInterface a = aligned_interface(chain, cfg, spec.modes);
  RankTransfer rank;
  rank.certified = true;
  BridgeReport b =
      bridge_check(a.sk, a.sk1, a.m_hat, a.s, a.con, a.radius, rank, spec.modes);
  EXPECT_NEAR(b.e_tr, 0.0, 1e-12);
  EXPECT_NEAR(b.residual, a.con.noise_frob, 1e-12);
  EXPECT_TRUE(b.residual_ok);
  EXPECT_TRUE(b.reextraction_identical);
  EXPECT_TRUE(b.certified);
}

TEST(Bridge, TailAtHalfRadius) {
  AlignedChainSpec spec;
  spec.seed = 4;
  auto chain = gen_aligned_chain(spec);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  const Index r = spec.modes;
  AlignedInterface base = aligned_interface(chain, cfg, r);
  ASSERT_GT(base.radius.r_cert, 0.0);
  const double tail_count = static_cast<double>(spec.ambient - r);
  const double norms = base.sk.op_norm() + base.sk1.op_norm();
  const double tau = 0.5 * base.radius.r_cert / (std::sqrt(tail_count) * norms);
  auto tailed = with_tail(chain, r, tau);
  AlignedInterface a = aligned_interface(tailed, cfg, r);
  RankTransfer rank;
  rank.certified = true;
  BridgeReport b = bridge_check(a.sk, a.sk1, a.m_hat, a.s, a.con, a.radius, rank, r);
  EXPECT_NEAR(b.e_tr, 0.5 * base.radius.r_cert, 1e-3 * base.radius.r_cert);
  EXPECT_TRUE(b.radius_ok);
  EXPECT_TRUE(b.residual_ok);
  EXPECT_TRUE(b.reextraction_identical);
}

TEST(Bridge, EnergyWindowSpecialization) {
  SynthChainSpec spec;
  spec.d = 48;
  spec.alpha = {1.0, 1.1};
  spec.seed = 8;
  auto chain = gen_power_law_chain(spec);
  GaugedSvd sk = gauged_svd(chain[0].w), sk1 = gauged_svd(chain[1].w);
  for (double eps : {0.2, 0.1}) {
    const Index rs = empirical_effective_rank(sk.sigma, eps);
    const Index rt = empirical_effective_rank(sk1.sigma, eps);
    const double e_tr = truncation_bound(sk, sk1, rs, rt);
    EXPECT_LE(e_tr, std::sqrt(eps * 48.0) * (sk.op_norm() + sk1.op_norm()));
  }
}

TEST(AnalyzeChain, SynthChainAllVerdicts) {
  AlignedChainSpec spec;
  spec.seed = 3;
  auto chain = gen_aligned_chain(spec);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  ChainAnalysis a = analyze_chain(chain, cfg, 2);
  EXPECT_TRUE(a.domain.spectral);
  EXPECT_TRUE(a.domain.compressibility);
  EXPECT_TRUE(a.domain.physical);
  EXPECT_TRUE(a.domain.full);
  EXPECT_EQ(a.domain.full,
            a.domain.spectral && a.domain.compressibility && a.domain.physical);
  for (const auto& ia : a.interfaces) {
    EXPECT_TRUE(ia.not_measured.empty());
    EXPECT_TRUE(ia.bridge.certified);
    EXPECT_TRUE(ia.stability.certified);
    EXPECT_TRUE(ia.icm_stability.stable);
  }
}

TEST(AnalyzeChain, ThreadCountDoesNotChangeResult) {
  AlignedChainSpec spec;
  spec.seed = 9;
  auto chain = gen_aligned_chain(spec);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  ChainAnalysis a = analyze_chain(chain, cfg, 1);
  ChainAnalysis b = analyze_chain(chain, cfg, 4);
  ASSERT_EQ(a.interfaces.size(), b.interfaces.size());
  for (size_t k = 0; k < a.interfaces.size(); ++k) {
    EXPECT_EQ(a.interfaces[k].transport.entries, b.interfaces[k].transport.entries);
    EXPECT_EQ(a.interfaces[k].radius.r_cert, b.interfaces[k].radius.r_cert);
  }
}

TEST(AnalyzeChain, SmallRhoFailsCompressibility) {
  AlignedChainSpec spec;
  spec.seed = 3;
  auto chain = gen_aligned_chain(spec);
  ProtocolConfig cfg = aligned_chain_protocol(spec, chain);
  ChainAnalysis a = analyze_chain(chain, cfg, 1);
  cfg.rho = 0.5 * static_cast<double>(a.layers[0].r_eps) / a.layers[0].svd.d_sp;
  DomainVerdict v = domain_membership(a, cfg, static_jacobian_proxy(chain));
  EXPECT_FALSE(v.compressibility);
  EXPECT_FALSE(v.full);
}

TEST(AnalyzeChain, TooShortChain) {
  std::vector<LayerMatrix> chain(1);
  chain[0].w = Mat::Identity(2, 2);
  try {
    analyze_chain(chain, ProtocolConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kManifest);
  }
}

TEST(FamilyCheck, FamilyOfOne) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  FamilyReport r = family_check(m, s, {{"ref", m}}, {});
  ASSERT_EQ(r.persistent.size(), 1u);
  EXPECT_TRUE(r.flagged.empty());
  EXPECT_TRUE(r.persistence_holds);
}

TEST(FamilyCheck, SmallAndLargeViews) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  CertificateRadius rad = certificate_radius(m, s, pairwise_margins(m, s));
  Rng rng(5);
  std::vector<std::pair<std::string, Mat>> views;
  for (int q = 0; q < 5; ++q) {
    Mat e = gaussian_matrix(4, 3, rng);
    views.emplace_back("near" + std::to_string(q), m + e * (0.9 * rad.r_cert / e.norm()));
  }
  Mat far = m;
  far.col(2).setConstant(0.4);
  views.emplace_back("far", far);
  FamilyReport r = family_check(m, s, views, {});
  EXPECT_EQ(r.persistent.size(), 5u);
  EXPECT_EQ(r.flagged, std::vector<std::string>{"far"});
  EXPECT_TRUE(r.persistence_holds);
  for (const auto& v : r.views) EXPECT_TRUE(v.e_bound_holds) << v.name;
}

TEST(FamilyCheck, GridMismatch) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  try {
    family_check(m, s, {{"bad", Mat::Zero(3, 3)}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

TEST(DisjointBins, SharedColumnToLowestGroup) {
  Mat m = shared_column_instance();
  AlignmentStructure s = two_groups(m);
  IndexSets bins = disjoint_bins(s);
  EXPECT_EQ((bins[0]), (IndexSet{0, 2}));
  EXPECT_EQ(bins[1], IndexSet{1});
}

}  // namespace
}  // namespace gsacert
