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

#include "speechfix/harness/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace speechfix::harness {

namespace {

constexpr const char* kHeader =
    "item_id,clean_path,degraded_path,applied_params,duration_s,sample_rate";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// One CSV record, honoring quoted fields (doubled quotes, embedded commas).
std::vector<std::string> split_record(const std::string& line, int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw std::invalid_argument("manifest: unterminated quote on line " + std::to_string(lineno));
  fields.push_back(std::move(cur));
  return fields;
}

void require_unique_ids(const std::vector<ManifestRow>& rows) {
  std::set<std::string> seen;
  for (const auto& row : rows)
    if (!seen.insert(row.item_id).second)
      throw std::invalid_argument("manifest: duplicate item_id \"" + row.item_id + "\"");
}

void require_relative(const std::string& p, const std::string& id) {
  if (std::filesystem::path(p).is_absolute())
    throw std::invalid_argument("manifest: path for \"" + id + "\" must be relative, got " + p);
}

}  // namespace

void write_manifest(const std::string& path, const CorpusManifest& manifest) {
  require_unique_ids(manifest.rows);
  std::ostringstream out;
  out << "# config_hash=" << manifest.config_hash << "\n";
  out << "# seed=" << manifest.seed << "\n";
  out << "# corpus_id=" << manifest.corpus_id << "\n";
  out << kHeader << "\n";
  char buf[64];
  for (const auto& row : manifest.rows) {
    require_relative(row.clean_path, row.item_id);
    require_relative(row.degraded_path, row.item_id);
    std::snprintf(buf, sizeof buf, "%.17g", row.duration_s);
    out << csv_field(row.item_id) << ',' << csv_field(row.clean_path) << ','
        << csv_field(row.degraded_path) << ',' << csv_field(row.applied_params.dump()) << ','
        << buf << ',' << row.sample_rate << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("manifest: cannot write " + path);
  f << out.str();
}

CorpusManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("manifest: cannot open " + path);

  CorpusManifest manifest;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      while (!key.empty() && key.front() == ' ') key.erase(key.begin());
      const std::string value = line.substr(eq + 1);
      if (key == "config_hash") manifest.config_hash = value;
      else if (key == "seed") manifest.seed = std::stoull(value);
      else if (key == "corpus_id") manifest.corpus_id = value;
      continue;
    }
    if (!saw_header) {
      if (line != kHeader)
        throw std::invalid_argument("manifest: unexpected header on line " +
                                    std::to_string(lineno) + ": " + line);
      saw_header = true;
      continue;
    }
    auto fields = split_record(line, lineno);
    if (fields.size() != 6)
      throw std::invalid_argument("manifest: expected 6 fields on line " + std::to_string(lineno) +
                                  ", got " + std::to_string(fields.size()));
    ManifestRow row;
    row.item_id = fields[0];
    row.clean_path = fields[1];
    row.degraded_path = fields[2];
    try {
      row.applied_params = nlohmann::json::parse(fields[3]);
      row.duration_s = std::stod(fields[4]);
      row.sample_rate = std::stoi(fields[5]);
    } catch (const std::exception& e) {
      throw std::invalid_argument("manifest: bad row on line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
    require_relative(row.clean_path, row.item_id);
    require_relative(row.degraded_path, row.item_id);
    manifest.rows.push_back(std::move(row));
  }
  if (!saw_header) throw std::invalid_argument("manifest: missing header row in " + path);
  require_unique_ids(manifest.rows);
  return manifest;
}

std::string resolve_path(const std::string& manifest_path, const std::string& relative) {
  return (std::filesystem::path(manifest_path).parent_path() / relative).string();
}

}  // namespace speechfix::harness
