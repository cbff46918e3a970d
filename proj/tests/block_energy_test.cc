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

#include <random>

#include <gtest/gtest.h>

#include "gsacert/errors.h"
#include "gsacert/spectral.h"
#include "gsacert/synth.h"

namespace gsacert {
namespace {

const IndexSets kUnit2 = {{0}, {1}};

TEST(BlockEnergy, DiagonalIsIdentity) {
  Mat a = Vec((Vec(2) << 1, 2).finished()).asDiagonal();
  BlockEnergyMatrix e = block_energy(a, kUnit2, kUnit2);
  EXPECT_EQ(e.e, Mat::Identity(2, 2));
  EXPECT_EQ(e.off_mass, 0.0);
  EXPECT_EQ(e.row_energy(1), 4.0);
}

TEST(BlockEnergy, AllOnes) {
  BlockEnergyMatrix e = block_energy(Mat::Ones(2, 2), kUnit2, kUnit2);
  EXPECT_EQ(e.e, Mat::Constant(2, 2, 0.5));
}

TEST(BlockEnergy, ZeroRowFlagged) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1;
  BlockEnergyMatrix e = block_energy(a, kUnit2, kUnit2);
  EXPECT_TRUE(e.zero_row[1]);
  EXPECT_FALSE(e.zero_row[0]);
  EXPECT_EQ(e.e.row(1).sum(), 0.0);
}

TEST(BadMass, BlockDiagonalIsZero) {
  Mat a = Vec((Vec(3) << 1, 2, 3).finished()).asDiagonal();
  IndexSets g = {{0}, {1}, {2}};
  BadMassReport r = bad_mass(a, g, g, {});
  EXPECT_EQ(r.normalized, 0.0);
  EXPECT_EQ(r.unnormalized, 0.0);
  EXPECT_TRUE(r.chain_holds);
}

TEST(BadMass, ChainFuzz) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Mat a = gaussian_matrix(6, 6, rng);
    IndexSets g = {{0, 1}, {2, 3}, {4, 5}};
    IndexSets c = {{0, 1}, {2, 3, 4}, {4, 5}};
    AcceptedGraph acc = {{1}, {0}, {}};
    BadMassReport r = bad_mass(a, g, c, acc);
    EXPECT_TRUE(r.chain_holds);
    EXPECT_LE(r.visible_frob_sq, r.unnormalized * (1 + 1e-12));
    EXPECT_LE(r.unnormalized, r.bound_rhs * (1 + 1e-12));
  }
}

TEST(MarginScreen, Example) {
  BlockEnergyMatrix e;
  e.e = Mat::Identity(2, 2);
  e.e(0, 1) = e.e(1, 0) = 0.005;
  e.row_energy = Vec::Ones(2);
  PairMargin p;
  p.i = 0;
  p.j = 1;
  p.m = 1.0;
  p.nondegenerate = true;
  ScreenReport r = margin_screen(e, {p});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_NEAR(r.pairs[0].h, 0.3, 1e-15);
  EXPECT_TRUE(r.all_certified);
  EXPECT_NEAR(r.zeta, 0.7, 1e-15);
  EXPECT_NEAR(r.pairs[0].slack, 1.0 / 9.0 - 0.01, 1e-15);
}

TEST(MarginScreen, DegeneratePairRejected) {
  BlockEnergyMatrix e;
  e.e = Mat::Identity(2, 2);
  e.row_energy = Vec::Ones(2);
  PairMargin p;
  p.j = 1;
  try {
    margin_screen(e, {p});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kDegenerate);
  }
}

TEST(MarginScreen, SlackPerturbationPersists) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double m = 0.5 + u(rng);
    const double a = u(rng) * m * m / 9.0;
    const double d = u(rng) * (m * m / 9.0 - a);
    EXPECT_LT(3.0 * std::sqrt(a + d) / m, 1.0);
  }
}

TEST(PerturbBound, IdenticalMatrices) {
  Rng rng(5);
  Mat a = gaussian_matrix(4, 4, rng);
  IndexSets g = {{0, 1}, {2, 3}};
  PerturbReport r = perturb_bound(a, a, g, g, 0.1);
  EXPECT_EQ(r.max_diff, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(PerturbBound, FuzzWithinBound) {
  Rng rng(6);
  IndexSets g = {{0, 1}, {2, 3}, {4, 5}};
  IndexSets c = {{0, 1}, {2, 3}, {4, 5}};
  for (int t = 0; t < 300; ++t) {
    Mat a = gaussian_matrix(6, 6, rng);
    Mat e = gaussian_matrix(6, 6, rng);
    e *= 1e-2 * (1 + t % 10) / e.norm();
    Mat b = a + e;
    double e_min = kInf;
    for (const auto& rows : g) {
      double ea = 0, eb = 0;
      for (Index r : rows) {
        ea += a.row(r).squaredNorm();
        eb += b.row(r).squaredNorm();
      }
      e_min = std::min({e_min, ea, eb});
    }
    PerturbReport r = perturb_bound(a, b, g, c, e_min);
    EXPECT_TRUE(r.holds) << r.max_diff << " " << r.bound;
  }
}

TEST(PerturbBound, FormulaValue) {
  EXPECT_NEAR(block_energy_perturbation_bound(1.0, 0.1, 0.5),
              2.1 * 0.1 / 0.5 + 2.1 * 0.1 / 0.25, 1e-15);
}

TEST(ScaleTransfer, UniformRowScaling) {
  Rng rng(7);
  Mat a = gaussian_matrix(4, 4, rng);
  IndexSets g = {{0, 1}, {2, 3}};
  ScaleTransferReport r = scale_transfer(a, Vec::Constant(4, 2.0), Vec::Ones(4), g, g, {});
  EXPECT_EQ(r.theta, 1.0);
  EXPECT_TRUE(r.sandwich_holds);
  EXPECT_NEAR(r.bad_a, r.bad_b, 1e-14);
}

TEST(ScaleTransfer, WeightsInOneTwo) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  IndexSets g = {{0, 1}, {2, 3}, {4, 5}};
  for (int t = 0; t < 200; ++t) {
    Mat a = gaussian_matrix(6, 6, rng);
    Vec dr(6), dc(6);
    for (Index i = 0; i < 6; ++i) {
      dr(i) = u(rng);
      dc(i) = u(rng);
    }
    dr(0) = 1.0;
    dr(1) = 2.0;
    dc(0) = 1.0;
    dc(1) = 2.0;
    ScaleTransferReport r = scale_transfer(a, dr, dc, g, g, {});
    EXPECT_NEAR(r.theta, 16.0, 1e-15);
    EXPECT_TRUE(r.sandwich_holds);
    EXPECT_TRUE(r.bad_transfer_holds);
    EXPECT_TRUE(r.zero_support_preserved);
  }
}

TEST(ScaleTransfer, NonPositiveWeight) {
  IndexSets g = {{0}, {1}};
  try {
    scale_transfer(Mat::Identity(2, 2), Vec::Zero(2), Vec::Ones(2), g, g, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

TEST(RowLeakage, BlockDiagonalL) {
  Rng rng(9);
  IndexSets g = {{0, 1}, {2, 3}};
  for (int t = 0; t < 100; ++t) {
    Mat a = gaussian_matrix(4, 4, rng);
    Mat l = Mat::Zero(4, 4);
    l.block(0, 0, 2, 2) = gaussian_matrix(2, 2, rng);
    l.block(2, 2, 2, 2) = gaussian_matrix(2, 2, rng);
    LeakageReport r = row_leakage(a, l, g, g, {});
    EXPECT_TRUE(r.holds);
    for (const auto& row : r.rows) {
      EXPECT_EQ(row.ell_off, 0.0);
      EXPECT_LE(row.bad_b, row.ell_ii * row.ell_ii * row.bad_a * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST(RowLeakage, GeneralFuzz) {
  Rng rng(10);
  IndexSets g = {{0, 1}, {2, 3}, {4}};
  IndexSets bins = {{0, 1, 2}, {2, 3}, {4, 5}};
  for (int t = 0; t < 200; ++t) {
    Mat a = gaussian_matrix(6, 6, rng);
    Mat l = Mat::Identity(6, 6) + 0.1 * gaussian_matrix(6, 6, rng);
    EXPECT_TRUE(row_leakage(a, l, g, bins, {{1}, {}, {}}).holds);
  }
}

TEST(Coarsen, IdentityMaps) {
  Rng rng(11);
  Mat a = gaussian_matrix(4, 4, rng);
  IndexSets g = {{0, 1}, {2, 3}};
  CoarseningReport r = coarsen(a, g, g, {0, 1}, {0, 1}, {});
  EXPECT_LE((r.coarse - block_energy(a, g, g).e).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(r.max_formula_error, 1e-15);
}

TEST(Coarsen, MergeTwoGroups) {
  // e = (1, 3); fine rows (1,0) and (0,1); both columns map to one target.
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = std::sqrt(3.0);
  CoarseningReport r = coarsen(a, kUnit2, kUnit2, {0, 0}, {0, 0}, {});
  ASSERT_EQ(r.coarse.rows(), 1);
  EXPECT_NEAR(r.coarse(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r.direct(0, 0), 1.0, 1e-15);
  EXPECT_TRUE(r.k1 && r.k2 && r.k3);
}

TEST(Coarsen, FuzzFormulaAndInequalities) {
  Rng rng(12);
  IndexSets g = {{0}, {1, 2}, {3}, {4, 5}};
  IndexSets c = {{0, 1}, {2}, {3, 4}, {5}};
  for (int t = 0; t < 100; ++t) {
    Mat a = gaussian_matrix(6, 6, rng);
    CoarseningReport r = coarsen(a, g, c, {0, 0, 1, 1}, {0, 1, 1, 0}, {{1}, {0}, {3}, {2}});
    EXPECT_LE(r.max_formula_error, 1e-12);
    EXPECT_TRUE(r.k1 && r.k2 && r.k3);
  }
}

TEST(Coarsen, AllBadZeroStaysZero) {
  Mat a = Vec((Vec(4) << 1, 2, 3, 4).finished()).asDiagonal();
  IndexSets g = {{0}, {1}, {2}, {3}};
  CoarseningReport r = coarsen(a, g, g, {0, 0, 1, 1}, {0, 0, 1, 1}, {});
  EXPECT_EQ(r.fine_bad_unnormalized, 0.0);
  EXPECT_EQ(r.coarse_bad_unnormalized, 0.0);
  EXPECT_TRUE(r.k1);
}

TEST(Coarsen, NonSurjective) {
  IndexSets g = {{0}, {1}};
  try {
    coarsen(Mat::Identity(2, 2), g, g, {0, 2}, {0, 1}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

TEST(WindowRobustness, EnergyWindows) {
  SynthChainSpec spec;
  spec.d = 32;
  spec.alpha = {1.0, 1.1};
  spec.seed = 13;
  auto chain = gen_power_law_chain(spec);
  GaugedSvd sk = gauged_svd(chain[0].w), sk1 = gauged_svd(chain[1].w);
  const Index r = empirical_effective_rank(sk.sigma, 0.5);
  const Index r2 = empirical_effective_rank(sk.sigma, 0.25);
  IndexSets g = {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}};
  IndexSets c = {{0}, {1}};
  WindowRobustness w = window_robustness(sk, sk1, r, r2, g, c);
  EXPECT_LE(w.delta_measured, w.delta_bound + 1e-12);
  EXPECT_TRUE(w.check.holds);
}

}  // namespace
}  // namespace gsacert
