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

#ifndef GSACERT_CONFIG_H_
#define GSACERT_CONFIG_H_

#include <string>

#include "gsacert/certificate.h"
#include "gsacert/json_out.h"

namespace gsacert {

// Keys match the ProtocolConfig field names. Unset optional numbers are null.
// Unknown keys, wrong types and out-of-range values raise kConfig naming the
// key.
ProtocolConfig config_from_json(const Json& j, const std::string& source = "config");
Json config_to_json(const ProtocolConfig& cfg);
// Reads the config and, if `partition_file` is set, the partition it names
// (relative to the config's directory).
ProtocolConfig read_config(const std::string& path);
void write_config(const std::string& path, const ProtocolConfig& cfg);
// Protocol matching gen_aligned_chain: support sizes {2, 2, 1, ...}, a
// near-zero noise tolerance, M at 1.5 times the static proxy and every null
// baseline enabled.
ProtocolConfig aligned_chain_protocol(const AlignedChainSpec& spec,
                                      const std::vector<LayerMatrix>& chain);

void validate_config(const ProtocolConfig& cfg, const std::string& source = "config");

}  // namespace gsacert

#endif  // GSACERT_CONFIG_H_
