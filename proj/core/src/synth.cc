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

#include "gsacert/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

std::vector<Index> permutation(Index n, Rng& rng) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  // Fisher-Yates with an explicit draw keeps the order independent of the
  // standard library's shuffle.
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

Vec unit_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec v(n);
  do {
    for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  } while (!(v.norm() > 0));
  return v / v.norm();
}

}  // namespace

Mat gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Mat g(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) g(r, c) = normal(rng);
  return g;
}

Mat random_orthogonal(Index n, Rng& rng) {
  Eigen::HouseholderQR<Mat> qr(gaussian_matrix(n, n, rng));
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  fix_column_signs(q, nullptr);
  return q;
}

Mat random_frame(Index n, Index k, Rng& rng) {
  if (k > n) fail(ErrorKind::kRange, "random_frame: more columns than rows");
  return random_orthogonal(n, rng).leftCols(k);
}

Vec power_law_spectrum(Index d, double alpha, double scale) {
  Vec s(d);
  for (Index i = 0; i < d; ++i) s(i) = scale * std::pow(static_cast<double>(i + 1), -alpha);
  return s;
}

Vec normalized_power_law(Index d, double alpha) {
  Vec s = power_law_spectrum(d, alpha);
  return s * std::sqrt(static_cast<double>(d) / s.squaredNorm());
}

std::vector<LayerMatrix> gen_power_law_chain(const SynthChainSpec& spec) {
  if (spec.d < 1) fail(ErrorKind::kInput, "gen_power_law_chain: d must be positive");
  Rng rng(spec.seed);
  std::vector<LayerMatrix> chain;
  Mat prev_out;
  for (size_t k = 0; k < spec.alpha.size(); ++k) {
    if (!(spec.alpha[k] > 0)) fail(ErrorKind::kInput, "gen_power_law_chain: alpha must be positive");
    const Vec sigma = spec.normalize ? normalized_power_law(spec.d, spec.alpha[k])
                                     : power_law_spectrum(spec.d, spec.alpha[k]);
    LayerMatrix layer;
    layer.label = "layer_" + std::to_string(k);
    if (spec.identity_frames) {
      layer.w = sigma.asDiagonal();
    } else {
      const Mat q = random_orthogonal(spec.d, rng);
      const Mat p = spec.chained_frames && k > 0 ? prev_out : random_orthogonal(spec.d, rng);
      layer.w = q * sigma.asDiagonal() * p.transpose();
      prev_out = q;
    }
    chain.push_back(std::move(layer));
  }
  return chain;
}

PlantedStructure gen_structured_transport(const SynthStructureSpec& spec) {
  const Index k = spec.groups, g = spec.rows_per_group, sd = spec.dedicated;
  if (k < 1 || g < 1 || sd < 1) fail(ErrorKind::kInput, "gen_structured_transport: empty group layout");
  if (g < sd) fail(ErrorKind::kInput, "gen_structured_transport: fewer rows than dedicated columns");
  if (!(spec.m > 0) || spec.o < 0 || spec.noise < 0) {
    fail(ErrorKind::kInput, "gen_structured_transport: margins must be positive, overlap and noise nonnegative");
  }
  const bool shared = spec.shared && k >= 2;
  if (shared && sd < 2) {
    fail(ErrorKind::kInput, "gen_structured_transport: a shared column needs two dedicated columns to keep m exact");
  }
  Rng rng(spec.seed);
  const Index n_shared = shared ? k - 1 : 0;
  const Index rows = k * g + spec.noise_rows;
  const Index cols = k * sd + n_shared + spec.extra_cols;
  Mat m = Mat::Zero(rows, cols);
  std::vector<int> labels(rows, 0);
  IndexSets active(k);
  std::vector<Mat> frames;
  for (Index i = 0; i < k; ++i) {
    const Mat p = random_frame(g, sd, rng);
    frames.push_back(p);
    for (Index r = 0; r < g; ++r) labels[i * g + r] = static_cast<int>(i + 1);
    for (Index c = 0; c < sd; ++c) {
      active[i].push_back(i * sd + c);
      for (Index r = 0; r < g; ++r) m(i * g + r, i * sd + c) = spec.m * p(r, c);
    }
  }
  for (Index e = 0; e < n_shared; ++e) {
    const Index col = k * sd + e;
    for (Index i : {e, e + 1}) {
      const Vec seg = frames[i] * unit_vector(sd, rng) * (spec.o / std::sqrt(2.0));
      for (Index r = 0; r < g; ++r) m(i * g + r, col) = seg(r);
      active[i].push_back(col);
    }
  }
  if (spec.noise > 0) {
    std::normal_distribution<double> normal;
    Mat noise = Mat::Zero(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      const int lab = labels[r];
      for (Index c = 0; c < cols; ++c) {
        const bool in_active =
            lab > 0 && std::binary_search(active[lab - 1].begin(), active[lab - 1].end(), c);
        if (!in_active) noise(r, c) = normal(rng);
      }
    }
    if (noise.norm() > 0) m += noise * (spec.noise / noise.norm());
  }
  for (auto& a : active) std::sort(a.begin(), a.end());

  PlantedStructure out;
  if (spec.shuffle) {
    const auto rp = permutation(rows, rng);
    const auto cp = permutation(cols, rng);
    Mat pm(rows, cols);
    std::vector<int> plabels(rows);
    std::vector<Index> col_new(cols);
    for (Index c = 0; c < cols; ++c) col_new[cp[c]] = c;
    for (Index r = 0; r < rows; ++r) {
      plabels[r] = labels[rp[r]];
      for (Index c = 0; c < cols; ++c) pm(r, c) = m(rp[r], cp[c]);
    }
    for (auto& a : active) {
      for (Index& c : a) c = col_new[c];
      std::sort(a.begin(), a.end());
    }
    m = pm;
    labels = plabels;
  }
  out.m = m;
  out.rows = partition_from_labels(labels);
  out.active = active;
  for (const auto& a : active) out.sizes.push_back(a.size());
  return out;
}

std::vector<LayerMatrix> gen_aligned_chain(const AlignedChainSpec& spec) {
  const Index n = spec.ambient, r = spec.modes;
  if (r < 3 || n < r || spec.layers < 2) {
    fail(ErrorKind::kInput, "gen_aligned_chain: need at least 3 modes, 2 layers, ambient >= modes");
  }
  if (!(spec.alpha > 0)) fail(ErrorKind::kInput, "gen_aligned_chain: alpha must be positive");
  Rng rng(spec.seed);
  const Index block = n / r;
  const Index hub = r - 1;
  const Vec sigma = normalized_power_law(r, spec.alpha);
  std::uniform_real_distribution<double> magnitude(0.5, 1.0);
  std::bernoulli_distribution sign;

  // Mode a < hub lives on its own row block with entries bounded away from
  // zero; the hub mode lives on blocks 0 and 1, orthogonal to both.
  auto frame = [&]() {
    const auto rows = permutation(n, rng);
    Mat q = Mat::Zero(n, r);
    for (Index a = 0; a < hub; ++a) {
      Vec v(block);
      for (Index t = 0; t < block; ++t) v(t) = (sign(rng) ? 1.0 : -1.0) * magnitude(rng);
      v.normalize();
      for (Index t = 0; t < block; ++t) q(rows[a * block + t], a) = v(t);
    }
    Vec h;
    bool dominated = false;
    while (!dominated) {
      h = unit_vector(2 * block, rng);
      for (Index a = 0; a < 2; ++a) {
        auto seg = h.segment(a * block, block);
        Vec u(block);
        for (Index t = 0; t < block; ++t) u(t) = q(rows[a * block + t], a);
        seg -= u * u.dot(seg);
      }
      h.normalize();
      // Every hub row must keep its block's mode as the dominant profile.
      dominated = true;
      for (Index a = 0; a < 2; ++a)
        for (Index t = 0; t < block; ++t)
          dominated = dominated && sigma(hub) * std::abs(h(a * block + t)) <
                                       0.5 * sigma(a) * std::abs(q(rows[a * block + t], a));
    }
    for (Index a = 0; a < 2; ++a)
      for (Index t = 0; t < block; ++t) q(rows[a * block + t], hub) = h(a * block + t);
    return q;
  };

  Mat p = random_frame(n, r, rng);
  std::vector<LayerMatrix> chain;
  for (Index k = 0; k < spec.layers; ++k) {
    const Mat q = frame();
    LayerMatrix layer;
    layer.label = "layer_" + std::to_string(k);
    layer.w = q * sigma.asDiagonal() * p.transpose();
    chain.push_back(std::move(layer));
    p = q;
  }
  return chain;
}

const char* baseline_name(Baseline b) {
  switch (b) {
    case Baseline::kGaussian: return "gaussian";
    case Baseline::kSpectrumPreserving: return "spectrum-preserving";
    case Baseline::kPermuted: return "permuted";
  }
  return "?";
}

Baseline parse_baseline(const std::string& name) {
  for (auto b : {Baseline::kGaussian, Baseline::kSpectrumPreserving, Baseline::kPermuted})
    if (name == baseline_name(b)) return b;
  fail(ErrorKind::kConfig, "unknown baseline '" + name + "'");
}

std::vector<LayerMatrix> make_baseline(const std::vector<LayerMatrix>& chain, Baseline b,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LayerMatrix> out;
  for (const auto& layer : chain) {
    LayerMatrix l;
    l.label = layer.label + ":" + baseline_name(b);
    const Mat& w = layer.w;
    switch (b) {
      case Baseline::kGaussian: {
        Mat g = gaussian_matrix(w.rows(), w.cols(), rng);
        l.w = g * (w.norm() / g.norm());
        break;
      }
      case Baseline::kSpectrumPreserving: {
        const Vec s = singular_values(w);
        const Index d = s.size();
        l.w = random_frame(w.rows(), d, rng) * s.asDiagonal() *
              random_frame(w.cols(), d, rng).transpose();
        break;
      }
      case Baseline::kPermuted: {
        const auto p = permutation(w.rows(), rng);
        l.w.resize(w.rows(), w.cols());
        for (Index r = 0; r < w.rows(); ++r) l.w.row(r) = w.row(p[r]);
        break;
      }
    }
    out.push_back(std::move(l));
  }
  return out;
}

IndexSet exhaustive_active_columns(const Vec& score, Index s) {
  const Index n = score.size();
  if (n > kMaxEnumerationColumns) fail(ErrorKind::kRange, "exhaustive_active_columns: instance too large for enumeration");
  if (s < 1 || s > n) fail(ErrorKind::kRange, "exhaustive_active_columns: size out of range");
  IndexSet best;
  double best_sum = -kInf;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != s) continue;
    IndexSet set;
    double sum = 0.0;
    for (Index c = 0; c < n; ++c) {
      if (mask & (1u << c)) {
        set.push_back(c);
        sum += score(c);
      }
    }
    if (sum > best_sum || (sum == best_sum && set < best)) {
      best_sum = sum;
      best = set;
    }
  }
  return best;
}

Index exhaustive_effective_rank(const Vec& weights, double eps) {
  double total = 0.0;
  for (Index i = 0; i < weights.size(); ++i) total += weights(i);
  for (Index r = 1; r <= weights.size(); ++r) {
    double prefix = 0.0;
    for (Index i = 0; i < r; ++i) prefix += weights(i);
    if (prefix >= (1.0 - eps) * total) return r;
  }
  return weights.size();
}

double closed_form_sigma_min_2x2(double a, double b, double c, double d) {
  // Eigenvalues of [[a,b],[c,d]]^T [[a,b],[c,d]].
  const double p = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, p * p - 4.0 * det * det));
  // Smaller root via the product of roots to avoid cancellation.
  const double big = 0.5 * (p + disc);
  return big > 0 ? std::sqrt(det * det / big) : 0.0;
}

}  // namespace gsacert
