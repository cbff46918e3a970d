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

#ifndef GSACERT_REPORT_H_
#define GSACERT_REPORT_H_

#include <string>
#include <vector>

#include "gsacert/certificate.h"
#include "gsacert/container.h"
#include "gsacert/json_out.h"

namespace gsacert {

constexpr const char* kNotMeasured = "not measured";

struct BaselineRun {
  Baseline kind = Baseline::kGaussian;
  bool ran = false;
  std::string error;
  ChainAnalysis analysis;
};

// Same pipeline on each null control listed in the config.
std::vector<BaselineRun> run_baselines(const std::vector<LayerMatrix>& chain,
                                       const ProtocolConfig& cfg, int threads = 1);

Json layer_json(const LayerAnalysis& l);
Json interface_json(const InterfaceAnalysis& ia);
Json domain_json(const DomainVerdict& v);
// One row per interface holding the decision-relevant certificate entries.
Json certificate_entries(const ChainAnalysis& a, const ProtocolConfig& cfg);
Json baseline_json(const BaselineRun& b, const ChainAnalysis& trained, const ProtocolConfig& cfg);

Json make_report(const ChainAnalysis& a, const ProtocolConfig& cfg, const Manifest* manifest,
                 const std::vector<BaselineRun>& baselines);

}  // namespace gsacert

#endif  // GSACERT_REPORT_H_
