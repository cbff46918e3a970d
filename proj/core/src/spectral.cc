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

#include "gsacert/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsacert/errors.h"

namespace gsacert {
namespace {

// Neumaier compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_eps(double eps, const char* op) {
  if (!(eps > 0.0 && eps < 1.0)) {
    fail(ErrorKind::kInput,
         std::string(op) + ": energy threshold must lie in (0,1)");
  }
}

void check_d(Index d, const char* op) {
  if (d < 1) fail(ErrorKind::kRange, std::string(op) + ": d must be >= 1");
}

constexpr int kSlopeGrid = 64;

}  // namespace

double harmonic_sum(Index d, double s) {
  check_d(d, "harmonic_sum");
  Kahan acc;
  for (Index i = d; i >= 1; --i) acc.add(std::pow(static_cast<double>(i), -s));
  return acc.value();
}

double radial_coordinate(Index d, double alpha) {
  return 0.5 * std::log(static_cast<double>(d) / harmonic_sum(d, 2.0 * alpha));
}

double slope(Index d, double alpha) {
  check_d(d, "slope");
  Kahan num, den;
  for (Index i = d; i >= 1; --i) {
    const double w = std::pow(static_cast<double>(i), -2.0 * alpha);
    num.add(std::log(static_cast<double>(i)) * w);
    den.add(w);
  }
  return num.value() / den.value();
}

double slope_min(Index d, Interval interval) {
  if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) ||
      interval.lo < 0.0 || interval.lo > interval.hi) {
    fail(ErrorKind::kDegenerate, "slope_min: degenerate exponent interval");
  }
  // The Gibbs mean of log i decreases in alpha, so the minimum sits at the
  // right end. The grid guards against a numerically nonmonotone profile.
  double best = slope(d, interval.hi);
  for (int g = 0; g < kSlopeGrid; ++g) {
    const double a = interval.lo + (interval.hi - interval.lo) * g / (kSlopeGrid - 1);
    best = std::min(best, slope(d, a));
  }
  return best;
}

Vec gibbs_weights(Index d, double alpha) {
  Vec w(d);
  for (Index i = 0; i < d; ++i) w(i) = std::pow(static_cast<double>(i + 1), -2.0 * alpha);
  return w;
}

double tail_mass(Index d, double alpha, Index r) {
  check_d(d, "tail_mass");
  if (r < 0 || r > d) fail(ErrorKind::kRange, "tail_mass: r outside [0,d]");
  if (r == 0) return 1.0;
  Kahan tail;
  for (Index i = d; i > r; --i) tail.add(std::pow(static_cast<double>(i), -2.0 * alpha));
  return tail.value() / harmonic_sum(d, 2.0 * alpha);
}

double empirical_tail(const Vec& sigma, Index r) {
  const Index d = sigma.size();
  if (r < 0 || r > d) fail(ErrorKind::kRange, "empirical_tail: r outside [0,d]");
  Kahan tail, total;
  for (Index i = d - 1; i >= 0; --i) {
    const double e = sigma(i) * sigma(i);
    total.add(e);
    if (i >= r) tail.add(e);
  }
  if (total.value() <= 0) fail(ErrorKind::kDegenerate, "empirical_tail: zero spectrum");
  return tail.value() / total.value();
}

double tail_error(const Vec& sigma, double alpha) {
  const Index d = sigma.size();
  check_d(d, "tail_error");
  Vec emp_tail(d + 1), model_tail(d + 1);
  Kahan e_acc, m_acc;
  emp_tail(d) = 0.0;
  model_tail(d) = 0.0;
  for (Index i = d; i >= 1; --i) {
    e_acc.add(sigma(i - 1) * sigma(i - 1));
    m_acc.add(std::pow(static_cast<double>(i), -2.0 * alpha));
    emp_tail(i - 1) = e_acc.value();
    model_tail(i - 1) = m_acc.value();
  }
  const double e_tot = emp_tail(0), m_tot = model_tail(0);
  if (e_tot <= 0) fail(ErrorKind::kDegenerate, "tail_error: zero spectrum");
  double sup = 0.0;
  for (Index r = 1; r < d; ++r) {
    sup = std::max(sup, std::abs(emp_tail(r) / e_tot - model_tail(r) / m_tot));
  }
  return sup;
}

CartanFit fit_power_law(const Vec& sigma, Index fit_lo, Index fit_hi) {
  const Index d = sigma.size();
  if (fit_hi == 0) fit_hi = d;
  if (fit_lo < 1 || fit_hi > d || fit_hi - fit_lo < 1) {
    fail(ErrorKind::kRange, "fit_power_law: fit range needs two indices inside [1," +
                                std::to_string(d) + "]");
  }
  if (!sigma.allFinite()) fail(ErrorKind::kInput, "fit_power_law: non-finite value");
  for (Index i = fit_lo; i <= fit_hi; ++i) {
    if (!(sigma(i - 1) > 0.0)) {
      fail(ErrorKind::kFitDomain, "fit_power_law: sigma_" + std::to_string(i) +
                                      " <= 0 inside the fit range");
    }
  }
  if (!(sigma(0) > 0.0)) fail(ErrorKind::kFitDomain, "fit_power_law: sigma_1 <= 0");

  const Index n = fit_hi - fit_lo + 1;
  double mx = 0.0, my = 0.0;
  for (Index i = fit_lo; i <= fit_hi; ++i) {
    mx += std::log(static_cast<double>(i));
    my += std::log(sigma(i - 1));
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (Index i = fit_lo; i <= fit_hi; ++i) {
    const double dx = std::log(static_cast<double>(i)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(sigma(i - 1)) - my);
  }
  const double b = sxy / sxx;
  const double a = my - b * mx;

  CartanFit fit;
  fit.d = d;
  fit.fit_lo = fit_lo;
  fit.fit_hi = fit_hi;
  fit.alpha = -b;
  fit.scale = std::exp(a);
  double rss = 0.0, dmax = 0.0;
  for (Index i = fit_lo; i <= fit_hi; ++i) {
    const double li = std::log(static_cast<double>(i));
    const double resid = std::log(sigma(i - 1)) - (a + b * li);
    rss += resid * resid;
    dmax = std::max(dmax, std::abs(std::expm1(resid)));
  }
  fit.delta_pl = dmax;
  fit.regression_residual = std::sqrt(rss / n);
  const double frob_sq = sigma.squaredNorm();
  const double log_top = std::log(sigma(0)) + 0.5 * std::log(static_cast<double>(d) / frob_sq);
  fit.chart_error = std::abs(log_top - radial_coordinate(d, fit.alpha));
  fit.tail_error = tail_error(sigma, fit.alpha);
  return fit;
}

Mat frobenius_normalize(const Mat& w, Index d) {
  const double f2 = w.squaredNorm();
  if (!(f2 > 0)) fail(ErrorKind::kDegenerate, "frobenius_normalize: zero matrix");
  return w * std::sqrt(static_cast<double>(d) / f2);
}

InterfaceBudget interface_budget_from_norms(double norm_k, double norm_k1,
                                            double norm_product) {
  if (!(norm_k > 0) || !(norm_k1 > 0)) {
    fail(ErrorKind::kDegenerate, "interface_budget: zero matrix");
  }
  InterfaceBudget b;
  b.norm_prev = norm_k;
  b.norm_next = norm_k1;
  b.norm_product = norm_product;
  b.lambda = norm_product / std::sqrt(norm_k * norm_k1);
  b.log_budget = std::log(b.lambda);
  b.non_backtracking = norm_product >= std::max(norm_k, norm_k1);
  return b;
}

InterfaceBudget interface_budget(const Mat& w_k, const Mat& w_k1) {
  if (w_k1.cols() != w_k.rows()) {
    fail(ErrorKind::kDimension, "interface_budget: W_{k+1} has " +
                                    std::to_string(w_k1.cols()) + " columns, W_k has " +
                                    std::to_string(w_k.rows()) + " rows");
  }
  return interface_budget_from_norms(op_norm(w_k), op_norm(w_k1), op_norm(w_k1 * w_k));
}

TvBoundReport cartan_tv_bound(const std::vector<CartanFit>& fits,
                              const std::vector<InterfaceBudget>& budgets,
                              Interval interval, Index d) {
  if (fits.size() != budgets.size() + 1 && !(fits.empty() && budgets.empty())) {
    fail(ErrorKind::kRange, "cartan_tv_bound: need one budget per interface");
  }
  TvBoundReport rep;
  rep.interval = interval;
  rep.slope_min = slope_min(d, interval);
  rep.applicable = true;
  for (const auto& f : fits) {
    if (f.alpha < interval.lo || f.alpha > interval.hi) rep.applicable = false;
  }
  double log_sum = 0.0, chart_sum = 0.0;
  for (size_t k = 0; k < budgets.size(); ++k) {
    rep.measured += std::abs(fits[k + 1].alpha - fits[k].alpha);
    if (!budgets[k].non_backtracking) rep.applicable = false;
    const double chart = fits[k].chart_error + fits[k + 1].chart_error;
    log_sum += budgets[k].log_budget;
    chart_sum += chart;
    rep.displacement_budget.push_back((2.0 * budgets[k].log_budget + chart) / rep.slope_min);
  }
  rep.exact_bound = 2.0 * log_sum / rep.slope_min;
  rep.robust_bound = rep.exact_bound + chart_sum / rep.slope_min;
  rep.exact_holds = rep.measured <= rep.exact_bound;
  rep.robust_holds = rep.measured <= rep.robust_bound;
  return rep;
}

Index effective_rank(const Vec& weights, double eps) {
  check_eps(eps, "effective_rank");
  const Index d = weights.size();
  if (d == 0) fail(ErrorKind::kRange, "effective_rank: empty measure");
  double total = 0.0;
  for (Index i = 0; i < d; ++i) total += weights(i);
  if (!(total > 0)) fail(ErrorKind::kDegenerate, "effective_rank: zero measure");
  const double need = (1.0 - eps) * total;
  double cum = 0.0;
  for (Index r = 1; r <= d; ++r) {
    cum += weights(r - 1);
    if (cum >= need) return r;
  }
  return d;
}

Index effective_rank(Index d, double alpha, double eps) {
  return effective_rank(gibbs_weights(d, alpha), eps);
}

Index empirical_effective_rank(const Vec& sigma, double eps) {
  return effective_rank(Vec(sigma.array().square()), eps);
}

RankMargins rank_margins(Index d, double alpha, double eps) {
  RankMargins m;
  m.r_model = effective_rank(d, alpha, eps);
  m.r_emp = m.r_model;
  m.tau_at_r = tail_mass(d, alpha, m.r_model);
  m.tau_before_r = tail_mass(d, alpha, m.r_model - 1);
  m.margin = std::min(eps - m.tau_at_r, m.tau_before_r - eps);
  return m;
}

RankMargins rank_margins(const Vec& sigma, double alpha, double eps) {
  RankMargins m = rank_margins(sigma.size(), alpha, eps);
  m.r_emp = empirical_effective_rank(sigma, eps);
  return m;
}

RankBounds model_rank_bounds(Index d, double alpha, double eps) {
  check_eps(eps, "model_rank_bounds");
  if (!(alpha > 0.5)) fail(ErrorKind::kInput, "model_rank_bounds: alpha must exceed 1/2");
  const double h = harmonic_sum(d, 2.0 * alpha);
  const double p = 2.0 * alpha - 1.0;
  RankBounds b;
  const double raw = std::pow(1.0 / (p * eps * h), 1.0 / p);
  b.upper = (raw >= static_cast<double>(d)) ? d : std::max<Index>(1, static_cast<Index>(std::ceil(raw)));
  const double rhs = eps * h;
  const double far = std::pow(static_cast<double>(d + 1), -p);
  Index best = -1;
  for (Index r = 0; r < d; ++r) {
    const double lhs = (std::pow(static_cast<double>(r + 1), -p) - far) / p;
    if (lhs >= rhs) best = r; else break;
  }
  b.lower = std::max<Index>(1, best + 1);
  return b;
}

RankTransfer rank_transfer_check(const CartanFit& fit_k, const CartanFit& fit_k1,
                                 Index d, double eps, double displacement,
                                 Index r_emp_k, Index r_emp_k1) {
  RankTransfer t;
  const RankMargins m = rank_margins(d, fit_k.alpha, eps);
  t.displacement = displacement;
  t.lhs = 2.0 * std::log(static_cast<double>(d)) * displacement + fit_k.tail_error +
          fit_k1.tail_error;
  t.margin = m.margin;
  t.certified = t.lhs < t.margin;
  t.r_model = m.r_model;
  t.r_emp_k = r_emp_k;
  t.r_emp_k1 = r_emp_k1;
  t.empirical_agree = r_emp_k == r_emp_k1;
  return t;
}

}  // namespace gsacert
