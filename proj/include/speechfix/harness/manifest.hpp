// Copyright 2026 The SpeechFix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace speechfix::harness {

struct ManifestRow {
  std::string item_id;
  // Relative to the manifest's directory.
  std::string clean_path;
  std::string degraded_path;
  // Concrete per-stage distortion parameters, in application order.
  nlohmann::json applied_params = nlohmann::json::array();
  double duration_s = 0.0;
  int sample_rate = 0;
};

struct CorpusManifest {
  // Carried as "# key=value" comment lines above the CSV header.
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string corpus_id;
  std::vector<ManifestRow> rows;
};

// Duplicate item ids are rejected on both paths.
void write_manifest(const std::string& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::string& path);

// Joins a manifest-relative path onto the manifest's directory.
std::string resolve_path(const std::string& manifest_path, const std::string& relative);

}  // namespace speechfix::harness
