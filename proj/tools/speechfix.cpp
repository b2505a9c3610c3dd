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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "speechfix/harness/commands.hpp"
#include "speechfix/harness/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"speechfix: simulate compound speech degradations, restore them, score the result"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;

  const char* descriptions[][2] = {
      {"simulate", "degrade a clean corpus and write a manifest"},
      {"rir-gen", "simulate a bank of room impulse responses"},
      {"train", "train the mel mask estimator on a simulated corpus"},
      {"restore", "run the restoration pipeline over degraded audio"},
      {"evaluate", "score estimates against clean references"},
  };
  for (const auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--config", config_path, "run configuration JSON")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    speechfix::harness::RunConfig cfg = speechfix::harness::load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) {
      cfg.seed = seed;
      cfg.chain.master_seed = seed;
    }
    if (sub->count("--out") > 0) cfg.io.out_dir = out_dir;

    const std::string name = sub->get_name();
    if (name == "simulate") return speechfix::harness::cmd_simulate(cfg);
    if (name == "rir-gen") return speechfix::harness::cmd_rir_gen(cfg);
    if (name == "train") return speechfix::harness::cmd_train(cfg);
    if (name == "restore") return speechfix::harness::cmd_restore(cfg);
    return speechfix::harness::cmd_evaluate(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "speechfix: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "speechfix: " << e.what() << "\n";
    return 1;
  }
}
