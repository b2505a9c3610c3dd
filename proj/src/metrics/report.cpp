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

#include "speechfix/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "speechfix/harness/workers.hpp"
#include "speechfix/io/wav.hpp"
#include "speechfix/metrics/metrics.hpp"

namespace speechfix::metrics {
namespace {

using Json = nlohmann::ordered_json;

// nlohmann serializes non-finite doubles as null, which is exactly the
// "not computed" encoding the schema wants.
Json metric_value(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json row_json(const UtteranceMetrics& m, bool with_id) {
  Json j;
  if (with_id) j["id"] = m.id;
  j["lsd"] = metric_value(m.lsd);
  j["ssim"] = metric_value(m.ssim);
  j["stoi"] = metric_value(m.stoi);
  j["si_sdr"] = metric_value(m.si_sdr);
  j["pesq_wb"] = nullptr;
  return j;
}

std::string csv_field(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::string& out, const std::string& id, const UtteranceMetrics& m) {
  out += csv_escape(id);
  out += ',';
  out += csv_field(m.lsd);
  out += ',';
  out += csv_field(m.ssim);
  out += ',';
  out += csv_field(m.stoi);
  out += ',';
  out += csv_field(m.si_sdr);
  out += ',';  // pesq_wb, reserved
  out += '\n';
}

void aggregate_field(const std::vector<UtteranceMetrics>& rows, double UtteranceMetrics::*field,
                     bool enabled, UtteranceMetrics& mean, UtteranceMetrics& stddev) {
  if (!enabled || rows.empty()) return;
  double m = 0.0;
  for (const UtteranceMetrics& r : rows) m += r.*field;
  m /= static_cast<double>(rows.size());
  double s = 0.0;
  for (const UtteranceMetrics& r : rows) {
    double d = r.*field - m;
    s += d * d;
  }
  mean.*field = m;
  stddev.*field = std::sqrt(s / static_cast<double>(rows.size()));
}

}  // namespace

std::string MetricsReport::to_json() const {
  Json j;
  j["meta"]["config_hash"] = meta.config_hash;
  j["meta"]["seed"] = meta.seed;
  j["meta"]["corpus_id"] = meta.corpus_id;
  j["meta"]["num_utterances"] = num_utterances;
  j["aggregate"]["mean"] = row_json(mean, false);
  j["aggregate"]["std"] = row_json(stddev, false);
  j["per_utterance"] = Json::array();
  for (const UtteranceMetrics& m : per_utterance) j["per_utterance"].push_back(row_json(m, true));
  j["failures"] = Json::array();
  for (const EvalFailure& f : failures) {
    Json e;
    e["id"] = f.id;
    e["error"] = f.error;
    j["failures"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_csv() const {
  std::string out = "id,lsd,ssim,stoi,si_sdr,pesq_wb\n";
  for (const UtteranceMetrics& m : per_utterance) csv_row(out, m.id, m);
  csv_row(out, "mean", mean);
  csv_row(out, "std", stddev);
  return out;
}

MetricsReport evaluate_corpus(const std::vector<EvalItem>& items, const MetricSet& metrics,
                              const ReportMeta& meta) {
  struct ItemResult {
    bool ok = false;
    UtteranceMetrics m;
    std::string error;
  };

  std::vector<ItemResult> results =
      harness::parallel_map(static_cast<int>(items.size()), [&](int i) {
        const EvalItem& item = items[static_cast<std::size_t>(i)];
        ItemResult r;
        r.m.id = item.id;
        try {
          AudioSegment ref = io::wav_read(item.ref_path);
          AudioSegment est = io::wav_read(item.est_path);
          if (metrics.lsd) r.m.lsd = lsd(ref, est);
          if (metrics.ssim) r.m.ssim = ssim_spec(ref, est);
          if (metrics.stoi) r.m.stoi = stoi(ref, est);
          if (metrics.si_sdr) r.m.si_sdr = si_sdr(ref, est);
          r.ok = true;
        } catch (const std::exception& e) {
          r.error = e.what();
        }
        return r;
      });

  MetricsReport report;
  report.meta = meta;
  report.mean.id = "mean";
  report.stddev.id = "std";
  for (ItemResult& r : results) {
    if (r.ok)
      report.per_utterance.push_back(std::move(r.m));
    else
      report.failures.push_back({std::move(r.m.id), std::move(r.error)});
  }
  report.num_utterances = static_cast<int>(report.per_utterance.size());

  aggregate_field(report.per_utterance, &UtteranceMetrics::lsd, metrics.lsd, report.mean,
                  report.stddev);
  aggregate_field(report.per_utterance, &UtteranceMetrics::ssim, metrics.ssim, report.mean,
                  report.stddev);
  aggregate_field(report.per_utterance, &UtteranceMetrics::stoi, metrics.stoi, report.mean,
                  report.stddev);
  aggregate_field(report.per_utterance, &UtteranceMetrics::si_sdr, metrics.si_sdr, report.mean,
                  report.stddev);
  return report;
}

}  // namespace speechfix::metrics
