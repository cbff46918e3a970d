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

#include "gsacert/capacity.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kGelu: return "gelu";
    case Activation::kTanh: return "tanh";
    case Activation::kSwish: return "swish";
    case Activation::kTabulated: return "tabulated";
  }
  return "?";
}

ActivationSpec parse_activation(const std::string& name) {
  for (auto a : {Activation::kIdentity, Activation::kRelu, Activation::kGelu, Activation::kTanh,
                 Activation::kSwish}) {
    if (name == activation_name(a)) return ActivationSpec{a, {}, {}};
  }
  fail(ErrorKind::kConfig, "unknown activation '" + name + "'");
}

double activation_derivative(const ActivationSpec& spec, double x) {
  switch (spec.kind) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return x > 0 ? 1.0 : 0.0;
    case Activation::kGelu: return normal_cdf(x) + x * normal_pdf(x);
    case Activation::kTanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case Activation::kSwish: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s + x * s * (1.0 - s);
    }
    case Activation::kTabulated: {
      const auto& k = spec.knots;
      const auto& v = spec.values;
      if (k.size() < 2 || k.size() != v.size()) {
        fail(ErrorKind::kInput, "tabulated derivative needs matching knots and values (at least two)");
      }
      if (x <= k.front()) return v.front();
      if (x >= k.back()) return v.back();
      const auto it = std::upper_bound(k.begin(), k.end(), x);
      const size_t hi = it - k.begin(), lo = hi - 1;
      const double t = (x - k[lo]) / (k[hi] - k[lo]);
      return v[lo] + t * (v[hi] - v[lo]);
    }
  }
  fail(ErrorKind::kInput, "activation derivative not evaluable");
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) fail(ErrorKind::kInput, "gauss_hermite: order must be positive");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Vec diag = Vec::Zero(order);
  Vec off(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Mat> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = solver.eigenvectors().row(0).transpose().cwiseAbs2();
  rule.weights /= rule.weights.sum();
  return rule;
}

ActivationMoments activation_moments(const ActivationSpec& spec, int order) {
  if (order < kMinQuadratureOrder) {
    fail(ErrorKind::kInput, "activation_moments: quadrature order must be at least " +
                                std::to_string(kMinQuadratureOrder));
  }
  if (spec.kind == Activation::kTabulated) {
    if (spec.knots.size() < 2 || spec.knots.size() != spec.values.size()) {
      fail(ErrorKind::kInput, "tabulated derivative needs matching knots and values (at least two)");
    }
    if (!std::is_sorted(spec.knots.begin(), spec.knots.end())) {
      fail(ErrorKind::kInput, "tabulated derivative knots must increase");
    }
  }
  const QuadratureRule rule = gauss_hermite(order);
  ActivationMoments m;
  m.order = order;
  m.activation = activation_name(spec.kind);
  for (Index i = 0; i < rule.nodes.size(); ++i) {
    const double g = activation_derivative(spec, rule.nodes(i));
    if (!std::isfinite(g)) fail(ErrorKind::kInput, "activation derivative is not finite");
    m.kappa += rule.weights(i) * g;
    m.chi += rule.weights(i) * g * g;
  }
  return m;
}

ScaleBounds scale_bounds(double e0, double s, Index layers, double m, double eta,
                         const ActivationMoments& moments) {
  if (layers <= 0) fail(ErrorKind::kInput, "scale_bounds: L must be positive");
  if (!(m > 1)) fail(ErrorKind::kInput, "scale_bounds: M must exceed 1");
  if (!(eta > 0 && eta <= 1)) fail(ErrorKind::kInput, "scale_bounds: eta must lie in (0,1]");
  if (!(e0 > 0) || !(s > 0)) fail(ErrorKind::kInput, "scale_bounds: e0 and s must be positive");
  if (!(moments.kappa > 0) || !(moments.chi > 0)) {
    fail(ErrorKind::kDegenerate, "scale_bounds: activation moments must be positive");
  }
  const double l = static_cast<double>(layers);
  ScaleBounds b;
  b.c_typical = std::sqrt((m * m - 1.0) / l * e0 / s) / (eta * moments.kappa);
  b.c_coherent = std::expm1(std::log(m) / l) / moments.chi;
  b.c_asymptotic = std::log(m) / (l * moments.chi);
  b.asymptotic_ratio = b.c_coherent / b.c_asymptotic;
  return b;
}

WidthBounds width_bounds(double r_out, const ActivationMoments& moments) {
  if (!(r_out > 0)) fail(ErrorKind::kInput, "width_bounds: r_out must be positive");
  if (!(moments.kappa != 0) || !(moments.chi > 0)) {
    fail(ErrorKind::kDegenerate, "width_bounds: activation moments must be nonzero");
  }
  WidthBounds w;
  w.coherent = static_cast<Index>(std::ceil(r_out / moments.chi));
  w.typical = static_cast<Index>(std::ceil(r_out / (moments.kappa * moments.kappa)));
  return w;
}

double energy_recursion(double e0, double s, Index layers, double eta, double kappa, double c) {
  const double inject = (eta * kappa * c) * (eta * kappa * c) * s;
  double e = e0;
  for (Index l = 0; l < layers; ++l) e += inject;
  return e;
}

double coherent_iteration(double x0, double chi, double c, Index layers) {
  double x = x0;
  for (Index l = 0; l < layers; ++l) x *= 1.0 + chi * c;
  return x;
}

}  // namespace gsacert
