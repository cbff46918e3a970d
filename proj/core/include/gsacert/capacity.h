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

#ifndef GSACERT_CAPACITY_H_
#define GSACERT_CAPACITY_H_

#include <string>
#include <vector>

#include "gsacert/gauge.h"

namespace gsacert {

enum class Activation { kIdentity, kRelu, kGelu, kTanh, kSwish, kTabulated };

// Built-in activation or a tabulated derivative phi'(x) on increasing knots,
// interpolated piecewise-linearly and held constant outside the table.
struct ActivationSpec {
  Activation kind = Activation::kIdentity;
  std::vector<double> knots;
  std::vector<double> values;
};

ActivationSpec parse_activation(const std::string& name);
const char* activation_name(Activation a);
double activation_derivative(const ActivationSpec& spec, double x);

// Gauss-Hermite rule for the standard normal; weights sum to one.
struct QuadratureRule {
  Vec nodes;
  Vec weights;
};
QuadratureRule gauss_hermite(int order);

constexpr int kDefaultQuadratureOrder = 64;
constexpr int kMinQuadratureOrder = 16;

struct ActivationMoments {
  double kappa = 0.0;  // E[phi'(Z)]
  double chi = 0.0;    // E[phi'(Z)^2]
  int order = 0;
  std::string activation;
};

ActivationMoments activation_moments(const ActivationSpec& spec,
                                     int order = kDefaultQuadratureOrder);

struct ScaleBounds {
  double c_typical = 0.0;
  double c_coherent = 0.0;
  double c_asymptotic = 0.0;  // log M / (L chi)
  double asymptotic_ratio = 0.0;  // c_coherent / c_asymptotic
  std::string conditional_on = "capacity-accounting assumptions";
};

ScaleBounds scale_bounds(double e0, double s, Index layers, double m, double eta,
                         const ActivationMoments& moments);

struct WidthBounds {
  Index coherent = 0;  // ceil(r / chi)
  Index typical = 0;   // ceil(r / kappa^2)
  std::string conditional_on = "capacity-accounting assumptions";
};

WidthBounds width_bounds(double r_out, const ActivationMoments& moments);

// Saturated energy recursion e_{l+1} = e_l + (eta kappa C)^2 s.
double energy_recursion(double e0, double s, Index layers, double eta, double kappa, double c);
// Saturated coherent iteration x_{l+1} = (1 + chi C) x_l.
double coherent_iteration(double x0, double chi, double c, Index layers);

}  // namespace gsacert

#endif  // GSACERT_CAPACITY_H_
