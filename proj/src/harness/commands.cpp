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

#include "speechfix/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "speechfix/degrade/chain.hpp"
#include "speechfix/degrade/rir.hpp"
#include "speechfix/dsp/mel.hpp"
#include "speechfix/dsp/stft.hpp"
#include "speechfix/harness/manifest.hpp"
#include "speechfix/harness/workers.hpp"
#include "speechfix/io/wav.hpp"
#include "speechfix/metrics/report.hpp"
#include "speechfix/nn/train.hpp"
#include "speechfix/restore/pipeline.hpp"
#include "speechfix/rng.hpp"
#include "speechfix/synth.hpp"

namespace fs = std::filesystem;

namespace speechfix::harness {

namespace {

// Salts deriving independent seed streams from the one run seed, so e.g.
// corpus synthesis never shares draws with the degradation chain.
constexpr std::uint64_t kSynthSalt = 0x636c65616eULL;   // "clean"
constexpr std::uint64_t kRoomSalt = 0x726f6f6dULL;      // "room"
constexpr std::uint64_t kRirSalt = 0x726972ULL;         // "rir"
constexpr std::uint64_t kTrainSalt = 0x747261696eULL;   // "train"
constexpr std::uint64_t kNetSalt = 0x6e6574ULL;         // "net"

std::string item_name(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, i);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

std::vector<fs::path> wav_files_in(const std::string& dir, const char* what) {
  if (!fs::is_directory(dir))
    throw std::invalid_argument(std::string(what) + ": not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

CorpusManifest require_manifest(const RunConfig& cfg, const char* cmd) {
  if (cfg.io.manifest.empty())
    throw std::invalid_argument(std::string(cmd) + ": io.manifest is required");
  CorpusManifest m = read_manifest(cfg.io.manifest);
  if (m.rows.empty())
    throw std::invalid_argument(std::string(cmd) + ": manifest has no items: " + cfg.io.manifest);
  return m;
}

Matrix crop_rows(const Matrix& m, int start, int count) {
  Matrix out(count, m.cols);
  for (int r = 0; r < count; ++r)
    for (int c = 0; c < m.cols; ++c) out.at(r, c) = m.at(start + r, c);
  return out;
}

Matrix mel_frames(const AudioSegment& a, const dsp::MelFilterbank& fb, int hop) {
  return dsp::apply_mel(dsp::stft(a, fb.fft_size, hop), fb).frames;
}

}  // namespace

std::string run_dir(const RunConfig& cfg, const std::string& command) {
  const fs::path dir = fs::path(cfg.io.out_dir) / (command + "-" + config_hash(cfg));
  fs::create_directories(dir);
  write_text((dir / "config.json").string(), to_json(cfg).dump(2) + "\n");
  return dir.string();
}

int cmd_simulate(const RunConfig& cfg) {
  degrade::DistortionChain chain = cfg.chain;
  chain.master_seed = cfg.seed;

  const std::string dir = run_dir(cfg, "sim");
  fs::create_directories(fs::path(dir) / "clean");
  fs::create_directories(fs::path(dir) / "degraded");

  // Collect the clean utterances: fixed-length windows gated on energy when
  // reading source files, synthetic utterances otherwise.
  std::vector<AudioSegment> clean;
  if (!cfg.io.clean_dir.empty()) {
    const auto files = wav_files_in(cfg.io.clean_dir, "simulate");
    if (files.empty())
      throw std::invalid_argument("simulate: no .wav files in clean_dir: " + cfg.io.clean_dir);
    for (const auto& f : files) {
      const AudioSegment a = io::wav_read(f.string());
      const int win =
          static_cast<int>(std::lround(cfg.simulate.segment_seconds * a.sample_rate));
      const double gate = cfg.simulate.min_energy_ratio * rms(a);
      for (std::size_t off = 0; off + win <= a.size(); off += win) {
        std::vector<double> seg(a.samples.begin() + off, a.samples.begin() + off + win);
        if (rms(seg) >= gate) clean.emplace_back(std::move(seg), a.sample_rate);
      }
    }
    if (clean.empty())
      throw std::invalid_argument(
          "simulate: no segment passed the energy gate; lower simulate.min_energy_ratio");
  } else {
    if (cfg.simulate.synth_count <= 0)
      throw std::invalid_argument("simulate: need io.clean_dir or simulate.synth_count > 0");
    const std::uint64_t salt = Rng::mix(cfg.seed, kSynthSalt);
    clean = parallel_map(cfg.simulate.synth_count, [&](int i) {
      return synth::synth_speech(Rng::mix(salt, static_cast<std::uint64_t>(i)),
                                 cfg.simulate.synth_seconds, 44100);
    });
  }

  struct ItemOut {
    ManifestRow row;
    std::string error;
  };
  const auto outs = parallel_map(static_cast<int>(clean.size()), [&](int i) -> ItemOut {
    const std::string id = item_name("utt", i);
    try {
      const AudioSegment& c = clean[static_cast<std::size_t>(i)];
      const std::string clean_rel = "clean/" + id + ".wav";
      const std::string degraded_rel = "degraded/" + id + ".wav";
      io::wav_write(dir + "/" + clean_rel, c, cfg.simulate.wav_format);

      degrade::ComposeResult r;
      if (chain.specs.empty())
        r.audio = c;
      else
        r = degrade::compose(chain, c, static_cast<std::uint64_t>(i));
      io::wav_write(dir + "/" + degraded_rel, r.audio, cfg.simulate.wav_format);

      ManifestRow row;
      row.item_id = id;
      row.clean_path = clean_rel;
      row.degraded_path = degraded_rel;
      row.applied_params = std::move(r.params);
      row.duration_s = c.duration_seconds();
      row.sample_rate = c.sample_rate;
      return {std::move(row), ""};
    } catch (const std::exception& e) {
      return {{}, id + ": " + e.what()};
    }
  });

  CorpusManifest manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.seed = cfg.seed;
  manifest.corpus_id = "sim-" + manifest.config_hash;
  int failed = 0;
  for (const auto& out : outs) {
    if (out.error.empty()) {
      manifest.rows.push_back(out.row);
    } else {
      std::cerr << "simulate: " << out.error << "\n";
      ++failed;
    }
  }
  write_manifest(dir + "/manifest.csv", manifest);
  std::cout << "simulate: " << manifest.rows.size() << " items -> " << dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_rir_gen(const RunConfig& cfg) {
  const std::string dir = run_dir(cfg, "rir");
  const std::uint64_t room_salt = Rng::mix(cfg.seed, kRoomSalt);
  const std::uint64_t sim_salt = Rng::mix(cfg.seed, kRirSalt);

  struct RirOut {
    degrade::RoomSpec room;
    double rt60_measured = 0.0;
    std::string file;
  };
  const auto outs = parallel_map(cfg.rir.count, [&](int i) -> RirOut {
    const auto idx = static_cast<std::uint64_t>(i);
    const degrade::RoomSpec room =
        degrade::sample_room(Rng::mix(room_salt, idx), cfg.rir.rt60_lo, cfg.rir.rt60_hi);
    const std::vector<double> rir =
        degrade::simulate_rir(room, cfg.rir.sample_rate, Rng::mix(sim_salt, idx));
    const std::string file = item_name("rir", i) + ".wav";
    io::wav_write(dir + "/" + file, AudioSegment(rir, cfg.rir.sample_rate),
                  io::WavFormat::float32);
    return {room, degrade::estimate_rt60_schroeder(rir, cfg.rir.sample_rate), file};
  });

  nlohmann::json meta;
  meta["config_hash"] = config_hash(cfg);
  meta["seed"] = cfg.seed;
  meta["sample_rate"] = cfg.rir.sample_rate;
  meta["count"] = cfg.rir.count;
  meta["rirs"] = nlohmann::json::array();
  for (const auto& out : outs) {
    meta["rirs"].push_back(
        {{"file", out.file},
         {"room", {out.room.dimensions[0], out.room.dimensions[1], out.room.dimensions[2]}},
         {"source", {out.room.source_pos[0], out.room.source_pos[1], out.room.source_pos[2]}},
         {"mic", {out.room.mic_pos[0], out.room.mic_pos[1], out.room.mic_pos[2]}},
         {"rt60_request", out.room.rt60},
         {"rt60_measured", out.rt60_measured}});
  }
  write_text(dir + "/rirs.json", meta.dump(2) + "\n");
  std::cout << "rir-gen: " << cfg.rir.count << " responses -> " << dir << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const CorpusManifest man = require_manifest(cfg, "train");
  const std::string dir = run_dir(cfg, "train");
  const std::string hash = config_hash(cfg);

  const int rate = man.rows.front().sample_rate;
  for (const auto& row : man.rows)
    if (row.sample_rate != rate)
      throw std::invalid_argument("train: manifest mixes sample rates");
  const auto fb = dsp::build_mel_filterbank(rate, cfg.analysis.fft_size, cfg.analysis.num_mels);

  // Mel pairs are precomputed once; training then only redraws crops.
  const auto pairs =
      parallel_map(static_cast<int>(man.rows.size()), [&](int i) -> std::pair<Matrix, Matrix> {
        const auto& row = man.rows[static_cast<std::size_t>(i)];
        const auto x = io::wav_read(resolve_path(cfg.io.manifest, row.degraded_path));
        const auto s = io::wav_read(resolve_path(cfg.io.manifest, row.clean_path));
        return {mel_frames(x, fb, cfg.analysis.hop), mel_frames(s, fb, cfg.analysis.hop)};
      });

  nn::MaskNet net(cfg.analysis.num_mels, cfg.training.base_width, cfg.training.blocks,
                  Rng::mix(cfg.seed, kNetSalt));
  const std::uint64_t stream_salt = Rng::mix(cfg.seed, kTrainSalt);
  const nn::PairStream stream = [&](int step) -> std::pair<Matrix, Matrix> {
    Rng r(Rng::mix(stream_salt, static_cast<std::uint64_t>(step)));
    const auto& [x, s] =
        pairs[static_cast<std::size_t>(r.uniform_int(0, static_cast<int>(pairs.size()) - 1))];
    const int crop = cfg.training.crop_frames;
    if (crop > 0 && x.rows > crop) {
      const int start = static_cast<int>(r.uniform_int(0, x.rows - crop));
      return {crop_rows(x, start, crop), crop_rows(s, start, crop)};
    }
    return {x, s};
  };

  nn::TrainConfig tc;
  tc.steps = cfg.training.steps;
  tc.eps = cfg.analysis.eps;
  tc.adam = cfg.training.adam;
  tc.on_step = [&](int step, double loss) {
    // on_step fires before the update, so a checkpoint at step k holds the
    // parameters after exactly k updates.
    if (step > 0 && step % cfg.training.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "ckpt-%06d.bin", step);
      nn::save_checkpoint(dir + "/" + name, net, {{"config_hash", hash}, {"step", step}});
    }
    if (step % 100 == 0) std::cout << "train: step " << step << " loss " << loss << "\n";
  };
  const nn::TrainResult result = nn::train(net, stream, tc);

  nn::save_checkpoint(dir + "/ckpt-final.bin", net,
                      {{"config_hash", hash}, {"step", cfg.training.steps}});
  std::string csv = "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, result.loss_history[i]);
    csv += buf;
  }
  write_text(dir + "/loss.csv", csv);
  std::cout << "train: " << cfg.training.steps << " steps -> " << dir << "\n";
  return 0;
}

int cmd_restore(const RunConfig& cfg) {
  struct Job {
    std::string id;
    std::string input;
    std::string target;  // aligned clean reference, oracle only
  };
  std::vector<Job> jobs;
  const restore::Estimator est = cfg.analysis.estimator;

  if (est == restore::Estimator::oracle) {
    const CorpusManifest man = require_manifest(cfg, "restore");
    for (const auto& row : man.rows)
      jobs.push_back({row.item_id, resolve_path(cfg.io.manifest, row.degraded_path),
                      resolve_path(cfg.io.manifest, row.clean_path)});
  } else if (!cfg.io.input.empty()) {
    if (fs::is_directory(cfg.io.input)) {
      for (const auto& f : wav_files_in(cfg.io.input, "restore"))
        jobs.push_back({f.stem().string(), f.string(), ""});
      if (jobs.empty())
        throw std::invalid_argument("restore: no .wav files in " + cfg.io.input);
    } else if (fs::is_regular_file(cfg.io.input)) {
      jobs.push_back({fs::path(cfg.io.input).stem().string(), cfg.io.input, ""});
    } else {
      throw std::invalid_argument("restore: input not found: " + cfg.io.input);
    }
  } else if (!cfg.io.manifest.empty()) {
    const CorpusManifest man = require_manifest(cfg, "restore");
    for (const auto& row : man.rows)
      jobs.push_back({row.item_id, resolve_path(cfg.io.manifest, row.degraded_path), ""});
  } else {
    throw std::invalid_argument("restore: need io.input or io.manifest");
  }

  restore::AnalysisConfig analysis = cfg.analysis;
  nn::MaskNet* net = nullptr;
  std::unique_ptr<nn::MaskNet> owned;
  if (est == restore::Estimator::trained) {
    std::string ckpt = !cfg.io.checkpoint.empty() ? cfg.io.checkpoint : analysis.checkpoint;
    if (ckpt.empty())
      throw std::invalid_argument("restore: trained estimator requires io.checkpoint");
    owned = std::make_unique<nn::MaskNet>(nn::load_checkpoint(ckpt));
    net = owned.get();
    analysis.net = net;
    analysis.checkpoint.clear();
    // The checkpoint is authoritative for its own mel width; the filterbank
    // has to match it or the mask can never apply.
    analysis.num_mels = net->num_mels();
  }

  const std::string dir = run_dir(cfg, "restore");
  const std::string tag = estimator_name(est);

  auto restore_one = [&](const Job& job) {
    const std::string out = dir + "/" + job.id + "." + tag + ".wav";
    if (est == restore::Estimator::identity) {
      // The unprocessed baseline: bytes pass through untouched.
      fs::copy_file(job.input, out, fs::copy_options::overwrite_existing);
      return;
    }
    const AudioSegment x = io::wav_read(job.input);
    const AudioSegment target = job.target.empty() ? AudioSegment() : io::wav_read(job.target);
    const AudioSegment y = restore::restore_pipeline(
        x, analysis, cfg.synthesis, job.target.empty() ? nullptr : &target);
    io::wav_write(out, y, io::WavFormat::float32);
  };

  int failed = 0;
  if (net != nullptr) {
    // The mask net is shared mutable state (autodiff graph nodes hang off its
    // parameters), so trained restoration runs items serially.
    for (const auto& job : jobs) {
      try {
        restore_one(job);
      } catch (const std::exception& e) {
        std::cerr << "restore: " << job.id << ": " << e.what() << "\n";
        ++failed;
      }
    }
  } else {
    const auto errors =
        parallel_map(static_cast<int>(jobs.size()), [&](int i) -> std::string {
          try {
            restore_one(jobs[static_cast<std::size_t>(i)]);
            return "";
          } catch (const std::exception& e) {
            return jobs[static_cast<std::size_t>(i)].id + ": " + e.what();
          }
        });
    for (const auto& err : errors)
      if (!err.empty()) {
        std::cerr << "restore: " << err << "\n";
        ++failed;
      }
  }
  std::cout << "restore: " << (jobs.size() - static_cast<std::size_t>(failed)) << " of "
            << jobs.size() << " items -> " << dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_evaluate(const RunConfig& cfg) {
  const CorpusManifest man = require_manifest(cfg, "evaluate");
  const std::string dir = run_dir(cfg, "eval");

  // Pair each manifest item with its estimate: a "<item_id>.*.wav" file in
  // restored_dir, or the degraded file itself when scoring unprocessed audio.
  std::vector<fs::path> restored;
  if (!cfg.io.restored_dir.empty()) restored = wav_files_in(cfg.io.restored_dir, "evaluate");

  std::vector<metrics::EvalItem> items;
  for (const auto& row : man.rows) {
    metrics::EvalItem item;
    item.id = row.item_id;
    item.ref_path = resolve_path(cfg.io.manifest, row.clean_path);
    if (cfg.io.restored_dir.empty()) {
      item.est_path = resolve_path(cfg.io.manifest, row.degraded_path);
    } else {
      const std::string prefix = row.item_id + ".";
      std::vector<std::string> matches;
      for (const auto& f : restored)
        if (f.filename().string().rfind(prefix, 0) == 0) matches.push_back(f.string());
      if (matches.size() > 1)
        throw std::invalid_argument("evaluate: multiple restored files for \"" + row.item_id +
                                    "\" in " + cfg.io.restored_dir);
      // A missing estimate surfaces as a recorded failure, not a crash.
      item.est_path = matches.empty()
                          ? cfg.io.restored_dir + "/" + row.item_id + ".wav"
                          : matches.front();
    }
    items.push_back(std::move(item));
  }

  metrics::ReportMeta meta;
  meta.config_hash = config_hash(cfg);
  meta.seed = cfg.seed;
  meta.corpus_id = man.corpus_id;
  const metrics::MetricsReport report = metrics::evaluate_corpus(items, cfg.metrics, meta);

  write_text(dir + "/report.json", report.to_json());
  write_text(dir + "/report.csv", report.to_csv());
  for (const auto& f : report.failures)
    std::cerr << "evaluate: " << f.id << ": " << f.error << "\n";
  std::cout << "evaluate: " << report.num_utterances << " of " << items.size() << " items -> "
            << dir << "\n";
  return report.failures.empty() ? 0 : 1;
}

}  // namespace speechfix::harness
