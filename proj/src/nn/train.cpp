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

#include "speechfix/nn/train.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "speechfix/nn/ops.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace speechfix::nn {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'C', 'K', 'P', 'T', '0', '1'};

// (frames x mels) matrix to a (1, 1, mels, frames) tensor, optionally with a
// constant offset folded in.
TensorPtr mel_to_tensor(const Matrix& frames, double offset = 0.0) {
  const int t_n = frames.rows, m_n = frames.cols;
  auto x = make_tensor({1, 1, m_n, t_n});
  for (int t = 0; t < t_n; ++t)
    for (int m = 0; m < m_n; ++m)
      x->v[static_cast<std::size_t>(m) * t_n + t] = frames.at(t, m) + offset;
  return x;
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint truncated");
}

}  // namespace

TrainResult train(MaskNet& net, const PairStream& stream, const TrainConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (config.eps <= 0.0) throw std::invalid_argument("eps must be positive");

  Adam opt(net.parameters(), config.adam);
  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(config.steps));

  for (int step = 0; step < config.steps; ++step) {
    auto [x_mel, s_mel] = stream(step);
    require_same_shape(x_mel, s_mel, "train pair");

    auto x = mel_to_tensor(x_mel);
    auto x_eps = mel_to_tensor(x_mel, config.eps);
    auto target = mel_to_tensor(s_mel);

    auto mask = net.forward(x, /*training=*/true);
    auto restored = mul(mask, x_eps);
    auto loss = mae_loss(restored, target);
    if (!std::isfinite(loss->v[0]))
      throw std::runtime_error("training diverged: loss is not finite at step " +
                               std::to_string(step));
    result.loss_history.push_back(loss->v[0]);
    if (config.on_step) config.on_step(step, loss->v[0]);

    opt.zero_grad();
    backward(loss);
    opt.step();
  }
  return result;
}

void save_checkpoint(const std::string& path, MaskNet& net, const nlohmann::json& extra) {
  nlohmann::json header;
  header["arch"] = {{"num_mels", net.num_mels()},
                    {"base_width", net.base_width()},
                    {"blocks", net.blocks()}};
  auto params = net.named_parameters();
  auto buffers = net.named_buffers();
  header["params"] = nlohmann::json::array();
  for (const auto& [name, p] : params)
    header["params"].push_back({{"name", name}, {"shape", p->shape}});
  header["buffers"] = nlohmann::json::array();
  for (const auto& [name, b] : buffers)
    header["buffers"].push_back({{"name", name}, {"channels", b->mean.size()}});
  header["extra"] = extra;

  const std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t head_len = head.size();
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, p] : params) write_doubles(out, p->v);
  for (const auto& [name, b] : buffers) {
    write_doubles(out, b->mean);
    write_doubles(out, b->var);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

MaskNet load_checkpoint(const std::string& path, nlohmann::json* extra) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (!in || head_len > (1u << 26)) throw std::runtime_error("corrupt checkpoint header");
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw std::runtime_error("checkpoint truncated");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("corrupt checkpoint header");
  }
  MaskNet net(header.at("arch").at("num_mels").get<int>(),
              header.at("arch").at("base_width").get<int>(),
              header.at("arch").at("blocks").get<int>(), /*seed=*/0);

  auto params = net.named_parameters();
  const auto& jparams = header.at("params");
  if (jparams.size() != params.size())
    throw std::runtime_error("checkpoint parameter list mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& [name, p] = params[i];
    if (jparams[i].at("name").get<std::string>() != name ||
        jparams[i].at("shape").get<std::vector<int>>() != p->shape)
      throw std::runtime_error("checkpoint parameter mismatch at " + name);
    read_doubles(in, p->v);
  }
  auto buffers = net.named_buffers();
  const auto& jbuffers = header.at("buffers");
  if (jbuffers.size() != buffers.size())
    throw std::runtime_error("checkpoint buffer list mismatch");
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    auto& [name, b] = buffers[i];
    if (jbuffers[i].at("name").get<std::string>() != name ||
        jbuffers[i].at("channels").get<std::size_t>() != b->mean.size())
      throw std::runtime_error("checkpoint buffer mismatch at " + name);
    read_doubles(in, b->mean);
    read_doubles(in, b->var);
  }
  if (extra) *extra = header.value("extra", nlohmann::json::object());
  return net;
}

}  // namespace speechfix::nn
