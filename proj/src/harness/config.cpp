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

#include "speechfix/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace speechfix::harness {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const char* where, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument(std::string("config: unknown key \"") + it.key() + "\" in " +
                                  where);
}

const json* field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num(const json& j, const char* name) {
  if (!j.is_number()) throw std::invalid_argument(std::string("config: ") + name + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const char* name) {
  if (!j.is_number_integer())
    throw std::invalid_argument(std::string("config: ") + name + " must be an integer");
  return j.get<int>();
}

bool boolean(const json& j, const char* name) {
  if (!j.is_boolean())
    throw std::invalid_argument(std::string("config: ") + name + " must be a boolean");
  return j.get<bool>();
}

std::string str(const json& j, const char* name) {
  if (!j.is_string())
    throw std::invalid_argument(std::string("config: ") + name + " must be a string");
  return j.get<std::string>();
}

restore::Estimator estimator_from_string(const std::string& s) {
  if (s == "oracle") return restore::Estimator::oracle;
  if (s == "identity") return restore::Estimator::identity;
  if (s == "trained") return restore::Estimator::trained;
  throw std::invalid_argument("config: unknown estimator \"" + s +
                              "\" (expected oracle, identity, or trained)");
}

restore::InversionMethod inversion_from_string(const std::string& s) {
  if (s == "pinv_clamped") return restore::InversionMethod::pinv_clamped;
  if (s == "nnls") return restore::InversionMethod::nnls;
  throw std::invalid_argument("config: unknown inversion \"" + s +
                              "\" (expected pinv_clamped or nnls)");
}

std::string inversion_name(restore::InversionMethod m) {
  return m == restore::InversionMethod::nnls ? "nnls" : "pinv_clamped";
}

io::WavFormat wav_format_from_string(const std::string& s) {
  if (s == "pcm16") return io::WavFormat::pcm16;
  if (s == "float32") return io::WavFormat::float32;
  throw std::invalid_argument("config: unknown wav_format \"" + s +
                              "\" (expected pcm16 or float32)");
}

std::string wav_format_name(io::WavFormat f) {
  return f == io::WavFormat::pcm16 ? "pcm16" : "float32";
}

void parse_analysis(const json& j, restore::AnalysisConfig& a) {
  reject_unknown_keys(j, "analysis", {"fft_size", "hop", "num_mels", "eps", "estimator"});
  if (const json* v = field(j, "fft_size")) a.fft_size = integer(*v, "analysis.fft_size");
  if (const json* v = field(j, "hop")) a.hop = integer(*v, "analysis.hop");
  if (const json* v = field(j, "num_mels")) a.num_mels = integer(*v, "analysis.num_mels");
  if (const json* v = field(j, "eps")) a.eps = num(*v, "analysis.eps");
  if (const json* v = field(j, "estimator"))
    a.estimator = estimator_from_string(str(*v, "analysis.estimator"));
}

void parse_synthesis(const json& j, restore::SynthesisConfig& s) {
  reject_unknown_keys(j, "synthesis", {"griffin_lim_iters", "inversion", "momentum"});
  if (const json* v = field(j, "griffin_lim_iters"))
    s.griffin_lim_iters = integer(*v, "synthesis.griffin_lim_iters");
  if (const json* v = field(j, "inversion"))
    s.inversion = inversion_from_string(str(*v, "synthesis.inversion"));
  if (const json* v = field(j, "momentum")) s.momentum = num(*v, "synthesis.momentum");
}

void parse_adam(const json& j, nn::AdamConfig& a) {
  reject_unknown_keys(j, "training.adam",
                      {"lr", "beta1", "beta2", "eps", "warmup_steps", "decay_interval", "decay"});
  if (const json* v = field(j, "lr")) a.lr = num(*v, "adam.lr");
  if (const json* v = field(j, "beta1")) a.beta1 = num(*v, "adam.beta1");
  if (const json* v = field(j, "beta2")) a.beta2 = num(*v, "adam.beta2");
  if (const json* v = field(j, "eps")) a.eps = num(*v, "adam.eps");
  if (const json* v = field(j, "warmup_steps")) a.warmup_steps = integer(*v, "adam.warmup_steps");
  if (const json* v = field(j, "decay_interval"))
    a.decay_interval = integer(*v, "adam.decay_interval");
  if (const json* v = field(j, "decay")) a.decay = num(*v, "adam.decay");
}

void parse_training(const json& j, TrainSettings& t) {
  reject_unknown_keys(j, "training",
                      {"steps", "checkpoint_every", "crop_frames", "base_width", "blocks", "adam"});
  if (const json* v = field(j, "steps")) t.steps = integer(*v, "training.steps");
  if (const json* v = field(j, "checkpoint_every"))
    t.checkpoint_every = integer(*v, "training.checkpoint_every");
  if (const json* v = field(j, "crop_frames")) t.crop_frames = integer(*v, "training.crop_frames");
  if (const json* v = field(j, "base_width")) t.base_width = integer(*v, "training.base_width");
  if (const json* v = field(j, "blocks")) t.blocks = integer(*v, "training.blocks");
  if (const json* v = field(j, "adam")) parse_adam(*v, t.adam);
}

void parse_simulate(const json& j, SimulateSettings& s) {
  reject_unknown_keys(
      j, "simulate",
      {"synth_count", "synth_seconds", "segment_seconds", "min_energy_ratio", "wav_format"});
  if (const json* v = field(j, "synth_count")) s.synth_count = integer(*v, "simulate.synth_count");
  if (const json* v = field(j, "synth_seconds"))
    s.synth_seconds = num(*v, "simulate.synth_seconds");
  if (const json* v = field(j, "segment_seconds"))
    s.segment_seconds = num(*v, "simulate.segment_seconds");
  if (const json* v = field(j, "min_energy_ratio"))
    s.min_energy_ratio = num(*v, "simulate.min_energy_ratio");
  if (const json* v = field(j, "wav_format"))
    s.wav_format = wav_format_from_string(str(*v, "simulate.wav_format"));
}

void parse_rir(const json& j, RirGenSettings& r) {
  reject_unknown_keys(j, "rir", {"count", "rt60_lo", "rt60_hi", "sample_rate"});
  if (const json* v = field(j, "count")) r.count = integer(*v, "rir.count");
  if (const json* v = field(j, "rt60_lo")) r.rt60_lo = num(*v, "rir.rt60_lo");
  if (const json* v = field(j, "rt60_hi")) r.rt60_hi = num(*v, "rir.rt60_hi");
  if (const json* v = field(j, "sample_rate")) r.sample_rate = integer(*v, "rir.sample_rate");
}

void parse_metrics(const json& j, metrics::MetricSet& m) {
  reject_unknown_keys(j, "metrics", {"lsd", "ssim", "stoi", "si_sdr"});
  if (const json* v = field(j, "lsd")) m.lsd = boolean(*v, "metrics.lsd");
  if (const json* v = field(j, "ssim")) m.ssim = boolean(*v, "metrics.ssim");
  if (const json* v = field(j, "stoi")) m.stoi = boolean(*v, "metrics.stoi");
  if (const json* v = field(j, "si_sdr")) m.si_sdr = boolean(*v, "metrics.si_sdr");
}

void parse_io(const json& j, IoPaths& io) {
  reject_unknown_keys(
      j, "io", {"clean_dir", "input", "manifest", "restored_dir", "checkpoint", "out_dir"});
  if (const json* v = field(j, "clean_dir")) io.clean_dir = str(*v, "io.clean_dir");
  if (const json* v = field(j, "input")) io.input = str(*v, "io.input");
  if (const json* v = field(j, "manifest")) io.manifest = str(*v, "io.manifest");
  if (const json* v = field(j, "restored_dir")) io.restored_dir = str(*v, "io.restored_dir");
  if (const json* v = field(j, "checkpoint")) io.checkpoint = str(*v, "io.checkpoint");
  if (const json* v = field(j, "out_dir")) io.out_dir = str(*v, "io.out_dir");
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  cfg.chain = degrade::default_chain();
  return cfg;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: document must be a JSON object");
  reject_unknown_keys(j, "config",
                      {"schema_version", "seed", "chain", "analysis", "synthesis", "training",
                       "simulate", "rir", "metrics", "io"});

  RunConfig cfg = default_config();
  if (const json* v = field(j, "schema_version"))
    cfg.schema_version = integer(*v, "schema_version");
  if (cfg.schema_version != kConfigSchemaVersion)
    throw std::invalid_argument("config: unsupported schema_version " +
                                std::to_string(cfg.schema_version) + " (expected " +
                                std::to_string(kConfigSchemaVersion) + ")");
  if (const json* v = field(j, "seed")) {
    if (!v->is_number_integer() && !v->is_number_unsigned())
      throw std::invalid_argument("config: seed must be an integer");
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const json* v = field(j, "chain")) cfg.chain = degrade::chain_from_json(*v);
  if (const json* v = field(j, "analysis")) parse_analysis(*v, cfg.analysis);
  if (const json* v = field(j, "synthesis")) parse_synthesis(*v, cfg.synthesis);
  if (const json* v = field(j, "training")) parse_training(*v, cfg.training);
  if (const json* v = field(j, "simulate")) parse_simulate(*v, cfg.simulate);
  if (const json* v = field(j, "rir")) parse_rir(*v, cfg.rir);
  if (const json* v = field(j, "metrics")) parse_metrics(*v, cfg.metrics);
  if (const json* v = field(j, "io")) parse_io(*v, cfg.io);

  // The run seed is the single source of truth; any master_seed inside the
  // chain document is overridden.
  cfg.chain.master_seed = cfg.seed;
  validate(cfg);
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["seed"] = cfg.seed;
  degrade::DistortionChain chain = cfg.chain;
  chain.master_seed = cfg.seed;
  j["chain"] = degrade::to_json(chain);
  j["analysis"] = {{"fft_size", cfg.analysis.fft_size},
                   {"hop", cfg.analysis.hop},
                   {"num_mels", cfg.analysis.num_mels},
                   {"eps", cfg.analysis.eps},
                   {"estimator", estimator_name(cfg.analysis.estimator)}};
  j["synthesis"] = {{"griffin_lim_iters", cfg.synthesis.griffin_lim_iters},
                    {"inversion", inversion_name(cfg.synthesis.inversion)},
                    {"momentum", cfg.synthesis.momentum}};
  j["training"] = {{"steps", cfg.training.steps},
                   {"checkpoint_every", cfg.training.checkpoint_every},
                   {"crop_frames", cfg.training.crop_frames},
                   {"base_width", cfg.training.base_width},
                   {"blocks", cfg.training.blocks},
                   {"adam",
                    {{"lr", cfg.training.adam.lr},
                     {"beta1", cfg.training.adam.beta1},
                     {"beta2", cfg.training.adam.beta2},
                     {"eps", cfg.training.adam.eps},
                     {"warmup_steps", cfg.training.adam.warmup_steps},
                     {"decay_interval", cfg.training.adam.decay_interval},
                     {"decay", cfg.training.adam.decay}}}};
  j["simulate"] = {{"synth_count", cfg.simulate.synth_count},
                   {"synth_seconds", cfg.simulate.synth_seconds},
                   {"segment_seconds", cfg.simulate.segment_seconds},
                   {"min_energy_ratio", cfg.simulate.min_energy_ratio},
                   {"wav_format", wav_format_name(cfg.simulate.wav_format)}};
  j["rir"] = {{"count", cfg.rir.count},
              {"rt60_lo", cfg.rir.rt60_lo},
              {"rt60_hi", cfg.rir.rt60_hi},
              {"sample_rate", cfg.rir.sample_rate}};
  j["metrics"] = {{"lsd", cfg.metrics.lsd},
                  {"ssim", cfg.metrics.ssim},
                  {"stoi", cfg.metrics.stoi},
                  {"si_sdr", cfg.metrics.si_sdr}};
  j["io"] = {{"clean_dir", cfg.io.clean_dir},     {"input", cfg.io.input},
             {"manifest", cfg.io.manifest},       {"restored_dir", cfg.io.restored_dir},
             {"checkpoint", cfg.io.checkpoint},   {"out_dir", cfg.io.out_dir}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& cfg) {
  degrade::validate(cfg.chain);
  const auto& a = cfg.analysis;
  if (a.fft_size <= 0 || (a.fft_size & (a.fft_size - 1)) != 0)
    throw std::invalid_argument("config: analysis.fft_size must be a positive power of two");
  if (a.hop <= 0 || a.hop > a.fft_size)
    throw std::invalid_argument("config: analysis.hop must lie in [1, fft_size]");
  if (a.num_mels <= 0 || a.num_mels > a.fft_size / 2 + 1)
    throw std::invalid_argument("config: analysis.num_mels out of range");
  if (!(a.eps > 0.0)) throw std::invalid_argument("config: analysis.eps must be positive");
  if (cfg.synthesis.griffin_lim_iters < 0)
    throw std::invalid_argument("config: synthesis.griffin_lim_iters must be >= 0");
  if (!(cfg.synthesis.momentum >= 0.0) || cfg.synthesis.momentum >= 1.0)
    throw std::invalid_argument("config: synthesis.momentum must lie in [0, 1)");
  const auto& t = cfg.training;
  if (t.steps <= 0) throw std::invalid_argument("config: training.steps must be positive");
  if (t.checkpoint_every <= 0)
    throw std::invalid_argument("config: training.checkpoint_every must be positive");
  if (t.crop_frames < 0)
    throw std::invalid_argument("config: training.crop_frames must be >= 0");
  if (t.base_width <= 0 || t.blocks <= 0)
    throw std::invalid_argument("config: training.base_width and blocks must be positive");
  if (!(t.adam.lr > 0.0)) throw std::invalid_argument("config: training.adam.lr must be positive");
  const auto& s = cfg.simulate;
  if (s.synth_count < 0) throw std::invalid_argument("config: simulate.synth_count must be >= 0");
  if (!(s.synth_seconds > 0.0) || !(s.segment_seconds > 0.0))
    throw std::invalid_argument("config: simulate durations must be positive");
  if (!(s.min_energy_ratio >= 0.0) || s.min_energy_ratio > 1.0)
    throw std::invalid_argument("config: simulate.min_energy_ratio must lie in [0, 1]");
  if (cfg.rir.count <= 0) throw std::invalid_argument("config: rir.count must be positive");
  if (!(cfg.rir.rt60_lo > 0.0) || !(cfg.rir.rt60_hi >= cfg.rir.rt60_lo))
    throw std::invalid_argument("config: rir rt60 range invalid");
  if (cfg.rir.sample_rate <= 0)
    throw std::invalid_argument("config: rir.sample_rate must be positive");
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  // FNV-1a, 64-bit.
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string estimator_name(restore::Estimator e) {
  switch (e) {
    case restore::Estimator::oracle: return "oracle";
    case restore::Estimator::identity: return "identity";
    case restore::Estimator::trained: return "trained";
  }
  return "identity";
}

}  // namespace speechfix::harness
