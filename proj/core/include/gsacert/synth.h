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

#ifndef GSACERT_SYNTH_H_
#define GSACERT_SYNTH_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gsacert/alignment.h"

namespace gsacert {

using Rng = std::mt19937_64;

Mat gaussian_matrix(Index rows, Index cols, Rng& rng);
// QR of a Gaussian draw with the column sign gauge applied.
Mat random_orthogonal(Index n, Rng& rng);
Mat random_frame(Index n, Index k, Rng& rng);  // n x k, orthonormal columns

// sigma_i = scale * i^-alpha.
Vec power_law_spectrum(Index d, double alpha, double scale = 1.0);
// Power-law list rescaled to sum sigma^2 = d.
Vec normalized_power_law(Index d, double alpha);

struct SynthChainSpec {
  Index d = 64;
  std::vector<double> alpha;  // one per layer
  std::uint64_t seed = 0;
  bool normalize = true;
  bool identity_frames = false;
  // Layer k+1 reads the output frame of layer k, so every interface is
  // non-backtracking.
  bool chained_frames = false;
};

std::vector<LayerMatrix> gen_power_law_chain(const SynthChainSpec& spec);

// Planted groups with all-equal core singular values m, one shared column per
// consecutive group pair carrying overlap norm o, and off-structure noise of
// Frobenius norm `noise`.
struct SynthStructureSpec {
  Index groups = 3;
  Index rows_per_group = 4;
  Index dedicated = 2;
  bool shared = true;
  double m = 1.0;
  double o = 0.2;
  double noise = 0.0;
  Index noise_rows = 0;
  Index extra_cols = 0;
  bool shuffle = true;
  std::uint64_t seed = 0;
};

struct PlantedStructure {
  Mat m;
  RowPartition rows;
  IndexSets active;
  std::vector<Index> sizes;
};

PlantedStructure gen_structured_transport(const SynthStructureSpec& spec);

// Exact-rank chain W_k = Q_k diag(sigma) Q_{k-1}^T with block-supported
// frames. Modes 0..modes-2 each own a block of ambient/modes rows; the weakest
// mode is spread over the blocks of modes 0 and 1, so the output-realized
// transport has groups of support sizes {2, 2, 1, ...} sharing one hub column
// and no noise.
struct AlignedChainSpec {
  Index ambient = 48;
  Index modes = 6;
  Index layers = 3;
  double alpha = 1.0;
  std::uint64_t seed = 0;
};

std::vector<LayerMatrix> gen_aligned_chain(const AlignedChainSpec& spec);

enum class Baseline { kGaussian, kSpectrumPreserving, kPermuted };
const char* baseline_name(Baseline b);
Baseline parse_baseline(const std::string& name);
std::vector<LayerMatrix> make_baseline(const std::vector<LayerMatrix>& chain, Baseline b,
                                       std::uint64_t seed);

// Brute-force references.
constexpr Index kMaxEnumerationColumns = 12;
IndexSet exhaustive_active_columns(const Vec& score, Index s);
Index exhaustive_effective_rank(const Vec& weights, double eps);
double closed_form_sigma_min_2x2(double a, double b, double c, double d);

}  // namespace gsacert

#endif  // GSACERT_SYNTH_H_
