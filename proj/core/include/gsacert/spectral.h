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

#ifndef GSACERT_SPECTRAL_H_
#define GSACERT_SPECTRAL_H_

#include <vector>

#include "gsacert/gauge.h"

namespace gsacert {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Power-law fit sigma_i ~ C i^-alpha over a 1-based inclusive index range.
struct CartanFit {
  double alpha = 0.0;
  double scale = 0.0;        // C of the raw (unnormalized) list
  double delta_pl = 0.0;     // max |sigma_i / (C i^-alpha) - 1| over the range
  double chart_error = 0.0;  // |log sigma~_1 - g_d(alpha)|, sigma~ Frobenius-normalized
  double tail_error = 0.0;   // sup_r |empirical tail(r) - tau_alpha(r)|
  double regression_residual = 0.0;  // RMS log residual of the fit
  Index d = 0;
  Index fit_lo = 1;
  Index fit_hi = 0;
};

struct InterfaceBudget {
  double lambda = 1.0;
  double log_budget = 0.0;
  bool non_backtracking = false;
  double norm_prev = 0.0;     // ||W_k||_2
  double norm_next = 0.0;     // ||W_{k+1}||_2
  double norm_product = 0.0;  // ||W_{k+1} W_k||_2
};

struct TvBoundReport {
  double measured = 0.0;
  double exact_bound = 0.0;
  double robust_bound = 0.0;
  double slope_min = 0.0;
  Interval interval;
  bool applicable = false;  // every interface non-backtracking, alphas in I
  bool exact_holds = false;
  bool robust_holds = false;
  std::vector<double> displacement_budget;  // B_k per interface
};

struct RankMargins {
  Index r_emp = 0;
  Index r_model = 0;
  double margin = 0.0;
  double tau_at_r = 0.0;
  double tau_before_r = 1.0;
};

struct RankBounds {
  Index lower = 1;
  Index upper = 1;
};

struct RankTransfer {
  double displacement = 0.0;  // B used on the left-hand side
  double lhs = 0.0;
  double margin = 0.0;
  bool certified = false;
  Index r_model = 0;
  Index r_emp_k = 0;
  Index r_emp_k1 = 0;
  bool empirical_agree = false;
};

double harmonic_sum(Index d, double s);
double radial_coordinate(Index d, double alpha);
double slope(Index d, double alpha);
double slope_min(Index d, Interval interval);

CartanFit fit_power_law(const Vec& sigma, Index fit_lo = 1, Index fit_hi = 0);

// Frobenius normalization to ||W||_F^2 = d_sp(W).
Mat frobenius_normalize(const Mat& w, Index d);

InterfaceBudget interface_budget(const Mat& w_k, const Mat& w_k1);
InterfaceBudget interface_budget_from_norms(double norm_k, double norm_k1,
                                            double norm_product);

TvBoundReport cartan_tv_bound(const std::vector<CartanFit>& fits,
                              const std::vector<InterfaceBudget>& budgets,
                              Interval interval, Index d);

// Gibbs tail tau_alpha(r) = sum_{i>r} i^-2alpha / H_{d,2alpha}.
double tail_mass(Index d, double alpha, Index r);
Vec gibbs_weights(Index d, double alpha);
// Empirical tail of the energy measure sigma_i^2 / sum sigma^2.
double empirical_tail(const Vec& sigma, Index r);
double tail_error(const Vec& sigma, double alpha);

// Minimal r with cumulative mass >= 1 - eps for nonnegative weights.
Index effective_rank(const Vec& weights, double eps);
Index effective_rank(Index d, double alpha, double eps);
Index empirical_effective_rank(const Vec& sigma, double eps);

RankMargins rank_margins(Index d, double alpha, double eps);
RankMargins rank_margins(const Vec& sigma, double alpha, double eps);
RankBounds model_rank_bounds(Index d, double alpha, double eps);

RankTransfer rank_transfer_check(const CartanFit& fit_k,
                                 const CartanFit& fit_k1, Index d, double eps,
                                 double displacement, Index r_emp_k,
                                 Index r_emp_k1);

}  // namespace gsacert

#endif  // GSACERT_SPECTRAL_H_
