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
#include <limits>
#include <string>
#include <vector>

namespace speechfix::metrics {

// NaN marks a metric that was not computed; serializers turn it into
// null (JSON) or an empty field (CSV).
struct UtteranceMetrics {
  std::string id;
  double lsd = std::numeric_limits<double>::quiet_NaN();
  double ssim = std::numeric_limits<double>::quiet_NaN();
  double stoi = std::numeric_limits<double>::quiet_NaN();
  double si_sdr = std::numeric_limits<double>::quiet_NaN();
};

struct MetricSet {
  bool lsd = true;
  bool ssim = true;
  bool stoi = true;
  bool si_sdr = true;
};

struct EvalFailure {
  std::string id;
  std::string error;
};

struct ReportMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string corpus_id;
};

// Evaluation results for a corpus of (reference, estimate) pairs. The report
// body carries no timestamps, so reruns over the same inputs are
// byte-identical. pesq_wb is reserved in both serializations and always null.
struct MetricsReport {
  std::vector<UtteranceMetrics> per_utterance;
  std::vector<EvalFailure> failures;
  UtteranceMetrics mean;    // arithmetic mean over per_utterance
  UtteranceMetrics stddev;  // population standard deviation
  ReportMeta meta;
  int num_utterances = 0;

  std::string to_json() const;
  // One row per utterance plus mean/std footer rows. Failed items appear
  // only in the JSON report.
  std::string to_csv() const;
};

struct EvalItem {
  std::string id;
  std::string ref_path;
  std::string est_path;
};

// Loads each pair from disk and scores the enabled metrics. Unreadable or
// unscorable items are recorded in failures and the run continues. Items are
// processed in parallel but collected in manifest order.
MetricsReport evaluate_corpus(const std::vector<EvalItem>& items, const MetricSet& metrics,
                              const ReportMeta& meta);

}  // namespace speechfix::metrics
