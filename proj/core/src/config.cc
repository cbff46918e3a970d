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

#include "gsacert/config.h"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include "gsacert/container.h"

namespace gsacert {
namespace {

[[noreturn]] void bad(const std::string& source, const std::string& key, const std::string& what) {
  fail(ErrorKind::kConfig, source + ": /" + key + ": " + what);
}

double get_double(const Json& v, const std::string& source, const std::string& key) {
  if (v.is_null()) return kNaN;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "nan") return kNaN;
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  bad(source, key, "expected a number or null");
}

Index get_index(const Json& v, const std::string& source, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    bad(source, key, "expected a nonnegative integer");
  return v.get<Index>();
}

bool get_bool(const Json& v, const std::string& source, const std::string& key) {
  if (!v.is_boolean()) bad(source, key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& v, const std::string& source, const std::string& key) {
  if (!v.is_string()) bad(source, key, "expected a string");
  return v.get<std::string>();
}

std::vector<Index> get_index_list(const Json& v, const std::string& source,
                                  const std::string& key) {
  if (!v.is_array()) bad(source, key, "expected an array of integers");
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_index(v[i], source, key + "/" + std::to_string(i)));
  return out;
}

Json optional_number(double x) { return std::isnan(x) ? Json(nullptr) : number(x); }

}  // namespace

ProtocolConfig config_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) fail(ErrorKind::kConfig, source + ": expected a JSON object");
  ProtocolConfig c;
  using Setter = std::function<void(const Json&, const std::string&)>;
  auto num = [&](double& field) {
    return Setter([&](const Json& v, const std::string& k) { field = get_double(v, source, k); });
  };
  auto idx = [&](Index& field) {
    return Setter([&](const Json& v, const std::string& k) { field = get_index(v, source, k); });
  };
  auto flag = [&](bool& field) {
    return Setter([&](const Json& v, const std::string& k) { field = get_bool(v, source, k); });
  };
  const std::map<std::string, Setter> setters = {
      {"variant",
       [&](const Json& v, const std::string& k) {
         c.variant = parse_variant(get_string(v, source, k));
       }},
      {"target_truncated", flag(c.target_truncated)},
      {"energy_threshold", num(c.energy_threshold)},
      {"fixed_rank", idx(c.fixed_rank)},
      {"rank_cutoff", num(c.rank_cutoff)},
      {"square_embed", flag(c.square_embed)},
      {"fit_lo", idx(c.fit_lo)},
      {"fit_hi", idx(c.fit_hi)},
      {"theta_row", num(c.theta_row)},
      {"mu_row", num(c.mu_row)},
      {"partition_file",
       [&](const Json& v, const std::string& k) { c.partition_file = get_string(v, source, k); }},
      {"partition",
       [&](const Json& v, const std::string& k) {
         c.partition.clear();
         for (Index x : get_index_list(v, source, k)) c.partition.push_back(static_cast<int>(x));
       }},
      {"support",
       [&](const Json& v, const std::string& k) {
         if (!v.is_object()) bad(source, k, "expected {\"sizes\": [...]} or {\"fractions\": [...]}");
         c.support = {};
         for (const auto& [sk, sv] : v.items()) {
           if (sk == "sizes") {
             c.support.sizes = get_index_list(sv, source, k + "/sizes");
           } else if (sk == "fractions") {
             if (!sv.is_array()) bad(source, k + "/fractions", "expected an array of numbers");
             for (const auto& x : sv) c.support.fractions.push_back(get_double(x, source, k + "/fractions"));
           } else {
             bad(source, k + "/" + sk, "unknown key");
           }
         }
       }},
      {"accepted",
       [&](const Json& v, const std::string& k) {
         if (!v.is_array()) bad(source, k, "expected an array of neighbour lists");
         c.accepted.clear();
         for (std::size_t i = 0; i < v.size(); ++i)
           c.accepted.push_back(get_index_list(v[i], source, k + "/" + std::to_string(i)));
       }},
      {"icm_q", [&](const Json& v, const std::string& k) { c.icm_q = get_index_list(v, source, k); }},
      {"tau_st", num(c.tau_st)},
      {"tau_sa", num(c.tau_sa)},
      {"zeta", num(c.zeta)},
      {"gamma0", num(c.gamma0)},
      {"eps_phys", num(c.eps_phys)},
      {"rho", num(c.rho)},
      {"eps_noise", num(c.eps_noise)},
      {"c_overlap", num(c.c_overlap)},
      {"eps_alpha", num(c.eps_alpha)},
      {"eps_c", num(c.eps_c)},
      {"jacobian_bound", num(c.jacobian_bound)},
      {"interval_lo", num(c.interval_lo)},
      {"interval_hi", num(c.interval_hi)},
      {"window_alt", idx(c.window_alt)},
      {"seed",
       [&](const Json& v, const std::string& k) {
         if (!v.is_number_unsigned()) bad(source, k, "expected a nonnegative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"baselines",
       [&](const Json& v, const std::string& k) {
         if (!v.is_array()) bad(source, k, "expected an array of baseline names");
         c.baselines.clear();
         for (const auto& b : v) {
           try {
             c.baselines.push_back(parse_baseline(get_string(b, source, k)));
           } catch (const Error& e) {
             bad(source, k, e.what());
           }
         }
       }},
  };
  for (const auto& [k, v] : j.items()) {
    auto it = setters.find(k);
    if (it == setters.end()) bad(source, k, "unknown key");
    try {
      it->second(v, k);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kConfig && std::string(e.what()).rfind(source, 0) == 0) throw;
      bad(source, k, e.what());
    }
  }
  validate_config(c, source);
  return c;
}

void validate_config(const ProtocolConfig& c, const std::string& source) {
  auto in_open = [](double x, double lo, double hi) { return x > lo && x < hi; };
  if (!in_open(c.energy_threshold, 0.0, 1.0)) bad(source, "energy_threshold", "must lie in (0,1)");
  if (!(c.rank_cutoff >= 0.0 && c.rank_cutoff < 1.0)) bad(source, "rank_cutoff", "must lie in [0,1)");
  if (c.fit_lo < 1) bad(source, "fit_lo", "must be at least 1");
  if (c.fit_hi != 0 && c.fit_hi <= c.fit_lo) bad(source, "fit_hi", "must exceed fit_lo or be 0");
  if (!(c.theta_row >= 0) || !(c.mu_row >= 0)) bad(source, "theta_row", "row thresholds must be nonnegative");
  if (c.support.sizes.empty() == c.support.fractions.empty())
    bad(source, "support", "give exactly one of sizes or fractions");
  for (double f : c.support.fractions)
    if (!(f > 0.0 && f <= 1.0)) bad(source, "support", "fractions must lie in (0,1]");
  for (Index s : c.support.sizes)
    if (s < 1) bad(source, "support", "sizes must be at least 1");
  if (c.icm_q.empty()) bad(source, "icm_q", "must list at least one value");
  if (!(c.tau_sa >= 0.0 && c.tau_sa <= 1.0)) bad(source, "tau_sa", "must lie in [0,1]");
  if (!(c.tau_st >= 0.0)) bad(source, "tau_st", "must be nonnegative");
  if (!in_open(c.zeta, 0.0, 1.0)) bad(source, "zeta", "must lie in (0,1)");
  if (!(c.gamma0 >= 0.0)) bad(source, "gamma0", "must be nonnegative");
  if (!(c.rho > 0.0 && c.rho <= 1.0)) bad(source, "rho", "must lie in (0,1]");
  if (!in_open(c.c_overlap, 0.0, 1.0 / 3.0)) bad(source, "c_overlap", "must lie in (0,1/3)");
  if (!std::isnan(c.eps_noise) && !(c.eps_noise >= 0.0)) bad(source, "eps_noise", "must be nonnegative");
  if (!std::isnan(c.jacobian_bound) && !(c.jacobian_bound > 0.0))
    bad(source, "jacobian_bound", "must be positive");
  if (std::isnan(c.interval_lo) != std::isnan(c.interval_hi))
    bad(source, "interval_lo", "interval_lo and interval_hi must be set together");
  if (!std::isnan(c.interval_lo) && !(c.interval_lo > 0.5 && c.interval_lo <= c.interval_hi))
    bad(source, "interval_lo", "need 1/2 < interval_lo <= interval_hi");
}

Json config_to_json(const ProtocolConfig& c) {
  Json j;
  j["variant"] = variant_name(c.variant);
  j["target_truncated"] = c.target_truncated;
  j["energy_threshold"] = number(c.energy_threshold);
  j["fixed_rank"] = c.fixed_rank;
  j["rank_cutoff"] = number(c.rank_cutoff);
  j["square_embed"] = c.square_embed;
  j["fit_lo"] = c.fit_lo;
  j["fit_hi"] = c.fit_hi;
  j["theta_row"] = number(c.theta_row);
  j["mu_row"] = number(c.mu_row);
  if (!c.partition_file.empty()) j["partition_file"] = c.partition_file;
  else if (!c.partition.empty()) j["partition"] = c.partition;
  Json support;
  if (!c.support.sizes.empty()) support["sizes"] = to_json(c.support.sizes);
  if (!c.support.fractions.empty()) {
    support["fractions"] = Json::array();
    for (double f : c.support.fractions) support["fractions"].push_back(number(f));
  }
  j["support"] = support;
  j["accepted"] = to_json(c.accepted);
  j["icm_q"] = to_json(c.icm_q);
  j["tau_st"] = number(c.tau_st);
  j["tau_sa"] = number(c.tau_sa);
  j["zeta"] = number(c.zeta);
  j["gamma0"] = number(c.gamma0);
  j["eps_phys"] = optional_number(c.eps_phys);
  j["rho"] = number(c.rho);
  j["eps_noise"] = optional_number(c.eps_noise);
  j["c_overlap"] = number(c.c_overlap);
  j["eps_alpha"] = optional_number(c.eps_alpha);
  j["eps_c"] = optional_number(c.eps_c);
  j["jacobian_bound"] = optional_number(c.jacobian_bound);
  j["interval_lo"] = optional_number(c.interval_lo);
  j["interval_hi"] = optional_number(c.interval_hi);
  j["window_alt"] = c.window_alt;
  j["seed"] = c.seed;
  j["baselines"] = Json::array();
  for (Baseline b : c.baselines) j["baselines"].push_back(baseline_name(b));
  return j;
}

ProtocolConfig read_config(const std::string& path) {
  ProtocolConfig c = config_from_json(parse_json(read_file(path), path, ErrorKind::kConfig), path);
  if (!c.partition_file.empty()) {
    const auto dir = std::filesystem::path(path).parent_path().string();
    c.partition = read_partition(join_path(dir, c.partition_file));
  }
  return c;
}

ProtocolConfig aligned_chain_protocol(const AlignedChainSpec& spec,
                                      const std::vector<LayerMatrix>& chain) {
  ProtocolConfig c;
  c.support.sizes.assign(spec.modes - 1, 1);
  c.support.sizes[0] = c.support.sizes[1] = 2;
  c.eps_noise = 1e-9;
  c.jacobian_bound = 1.5 * static_jacobian_proxy(chain);
  c.seed = spec.seed;
  c.baselines = {Baseline::kGaussian, Baseline::kSpectrumPreserving, Baseline::kPermuted};
  return c;
}

void write_config(const std::string& path, const ProtocolConfig& cfg) {
  write_json(path, config_to_json(cfg));
}

}  // namespace gsacert
