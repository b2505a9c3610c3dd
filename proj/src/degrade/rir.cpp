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

#include "speechfix/degrade/rir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "speechfix/rng.hpp"

namespace speechfix::degrade {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kSpeedOfSound = 343.0;  // m/s
constexpr int kSincHalf = 20;            // 41-tap fractional-delay kernel

void validate_room(const RoomSpec& room) {
  for (int i = 0; i < 3; ++i) {
    if (!(room.dimensions[i] > 0.0)) throw std::invalid_argument("room dimensions must be positive");
    if (!(room.source_pos[i] > 0.0 && room.source_pos[i] < room.dimensions[i]))
      throw std::invalid_argument("source position outside the room");
    if (!(room.mic_pos[i] > 0.0 && room.mic_pos[i] < room.dimensions[i]))
      throw std::invalid_argument("mic position outside the room");
  }
  if (!(room.rt60 > 0.0)) throw std::invalid_argument("rt60 must be positive");
  if (room.max_order < 0) throw std::invalid_argument("max_order must be non-negative");
}

// Splats an impulse of the given amplitude at a fractional sample delay.
void add_tap(std::vector<double>& rir, double delay, double amp) {
  const int lo = std::max(0, static_cast<int>(std::ceil(delay)) - kSincHalf);
  const int hi = std::min(static_cast<int>(rir.size()) - 1,
                          static_cast<int>(std::floor(delay)) + kSincHalf);
  for (int k = lo; k <= hi; ++k) {
    const double t = k - delay;
    const double u = t / (kSincHalf + 1);
    if (u <= -1.0 || u >= 1.0) continue;
    const double w = 0.5 * (1.0 + std::cos(kPi * u));
    const double s = (std::abs(t) < 1e-12) ? 1.0 : std::sin(kPi * t) / (kPi * t);
    rir[static_cast<std::size_t>(k)] += amp * s * w;
  }
}

}  // namespace

double sabine_absorption(const RoomSpec& room) {
  const double v = room.dimensions[0] * room.dimensions[1] * room.dimensions[2];
  const double s = 2.0 * (room.dimensions[0] * room.dimensions[1] +
                          room.dimensions[1] * room.dimensions[2] +
                          room.dimensions[0] * room.dimensions[2]);
  return 0.161 * v / (room.rt60 * s);
}

std::vector<double> simulate_rir(const RoomSpec& room, int sample_rate, std::uint64_t seed,
                                 const RirOptions& options) {
  validate_room(room);
  if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");

  const double alpha_sabine = sabine_absorption(room);
  double alpha;
  if (options.fixed_absorption >= 0.0) {
    if (options.fixed_absorption > 1.0)
      throw std::invalid_argument("fixed_absorption must lie in [0, 1]");
    alpha = options.fixed_absorption;
  } else {
    if (alpha_sabine > 1.0) throw std::invalid_argument("infeasible RT60: room too small");
    alpha = (options.absorption == AbsorptionModel::eyring) ? 1.0 - std::exp(-alpha_sabine)
                                                            : std::min(alpha_sabine, 1.0);
  }
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha));

  // Long enough to hold the full decay plus the interpolation kernel.
  const double t_max = room.rt60 * 1.1;
  const std::size_t len = static_cast<std::size_t>(std::ceil(t_max * sample_rate)) +
                          static_cast<std::size_t>(std::ceil(room.rt60 * sample_rate) * 0.05) +
                          2 * kSincHalf + 1;
  std::vector<double> rir(std::max<std::size_t>(
      len, static_cast<std::size_t>(std::ceil(room.rt60 * sample_rate)) + 2 * kSincHalf + 1), 0.0);

  const double d_max = kSpeedOfSound * (static_cast<double>(rir.size()) - kSincHalf) / sample_rate;
  Rng rng(Rng::mix(seed, 0x5249524dULL));

  int range[3];
  for (int i = 0; i < 3; ++i)
    range[i] = static_cast<int>(std::ceil((d_max + room.dimensions[i]) / (2.0 * room.dimensions[i])));

  for (int qx = 0; qx <= 1; ++qx)
    for (int qy = 0; qy <= 1; ++qy)
      for (int qz = 0; qz <= 1; ++qz)
        for (int nx = -range[0]; nx <= range[0]; ++nx)
          for (int ny = -range[1]; ny <= range[1]; ++ny)
            for (int nz = -range[2]; nz <= range[2]; ++nz) {
              const int q[3] = {qx, qy, qz};
              const int n[3] = {nx, ny, nz};
              int refl = 0;
              double pos[3];
              for (int i = 0; i < 3; ++i) {
                refl += std::abs(n[i] - q[i]) + std::abs(n[i]);
                pos[i] = (1 - 2 * q[i]) * room.source_pos[i] + 2.0 * n[i] * room.dimensions[i];
              }
              if (refl > room.max_order) continue;
              if (refl > 1) {
                // Millimeter-scale jitter decorrelates the regular image
                // lattice (sweeping echoes) without changing the decay.
                for (double& p : pos) p += rng.uniform(-0.004, 0.004);
              }
              double d2 = 0.0;
              for (int i = 0; i < 3; ++i) {
                const double dd = pos[i] - room.mic_pos[i];
                d2 += dd * dd;
              }
              const double d = std::max(std::sqrt(d2), 0.01);
              if (d > d_max) continue;
              const double delay = d / kSpeedOfSound * sample_rate;
              if (delay + kSincHalf >= static_cast<double>(rir.size())) continue;
              const double amp = std::pow(beta, refl) / (4.0 * kPi * d);
              if (amp < 1e-12) continue;
              add_tap(rir, delay, amp);
            }

  if (options.fixed_absorption < 0.0 && options.match_rt60) {
    // Nudge the measured decay rate onto the requested one.
    for (int pass = 0; pass < 3; ++pass) {
      double est;
      try {
        est = estimate_rt60_schroeder(rir, sample_rate);
      } catch (const std::exception&) {
        break;
      }
      if (std::abs(est - room.rt60) <= 0.02 * room.rt60) break;
      const double delta_db_per_s = -60.0 / room.rt60 + 60.0 / est;
      for (std::size_t i = 0; i < rir.size(); ++i)
        rir[i] *= std::pow(10.0, delta_db_per_s * (static_cast<double>(i) / sample_rate) / 20.0);
    }
  }
  return rir;
}

RoomSpec sample_room(std::uint64_t seed, double rt60_lo, double rt60_hi) {
  if (!(rt60_lo > 0.0) || rt60_hi < rt60_lo)
    throw std::invalid_argument("sample_room: bad rt60 range");
  Rng rng(Rng::mix(seed, 0x524f4f4dULL));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    RoomSpec room;
    for (int i = 0; i < 3; ++i) room.dimensions[i] = rng.uniform(3.0, 10.0);
    room.rt60 = rng.uniform(rt60_lo, rt60_hi);
    for (int i = 0; i < 3; ++i) {
      room.source_pos[i] = rng.uniform(0.5, room.dimensions[i] - 0.5);
      room.mic_pos[i] = rng.uniform(0.5, room.dimensions[i] - 0.5);
    }
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double dd = room.source_pos[i] - room.mic_pos[i];
      d2 += dd * dd;
    }
    if (d2 < 0.3 * 0.3) continue;
    if (sabine_absorption(room) > 0.95) continue;  // too dead to realize
    const double min_dim = *std::min_element(room.dimensions.begin(), room.dimensions.end());
    room.max_order = static_cast<int>(std::ceil(3.0 * kSpeedOfSound * room.rt60 * 1.2 / (2.0 * min_dim))) + 6;
    return room;
  }
  throw std::runtime_error("sample_room: rejection sampling failed");
}

double estimate_rt60_schroeder(const std::vector<double>& rir, int sample_rate) {
  if (rir.empty()) throw std::invalid_argument("estimate_rt60: empty rir");
  std::vector<double> energy(rir.size());
  double acc = 0.0;
  for (std::size_t i = rir.size(); i-- > 0;) {
    acc += rir[i] * rir[i];
    energy[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("estimate_rt60: silent rir");

  // Decay curve in dB relative to the full integral.
  std::vector<double> curve(rir.size());
  for (std::size_t i = 0; i < rir.size(); ++i)
    curve[i] = 10.0 * std::log10(std::max(energy[i] / acc, 1e-300));

  std::size_t t5 = 0, t25 = 0;
  while (t5 < curve.size() && curve[t5] > -5.0) ++t5;
  t25 = t5;
  while (t25 < curve.size() && curve[t25] > -25.0) ++t25;
  if (t25 >= curve.size() || t25 <= t5)
    throw std::runtime_error("estimate_rt60: decay range not reached");

  // Least-squares line through the -5..-25 dB span.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t25 - t5 + 1);
  for (std::size_t i = t5; i <= t25; ++i) {
    const double x = static_cast<double>(i) / sample_rate;
    sx += x;
    sy += curve[i];
    sxx += x * x;
    sxy += x * curve[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0)) throw std::runtime_error("estimate_rt60: non-decaying curve");
  return -60.0 / slope;
}

}  // namespace speechfix::degrade
