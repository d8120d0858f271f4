// Copyright 2026 The Orthonoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "orthonoise/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"orthonoise: tug-of-war with orthogonal noise, DPP solver and game simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  for (const auto& [name, help] : {std::pair{"solve", "iterate the DPP from below and above and certify the gap"},
                                   std::pair{"game", "estimate game values by Monte Carlo playouts"},
                                   std::pair{"verify", "run the property checks and write checks.json"},
                                   std::pair{"sweep", "solve once per value of one parameter"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : orthonoise::kExitInvalidConfig;
  }

  nlohmann::json doc;
  try {
    std::ifstream is(config_path);
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid config: " << config_path << ": " << e.what() << '\n';
    return orthonoise::kExitInvalidConfig;
  }

  orthonoise::CommandOptions opts;
  opts.out = out;
  opts.quiet = quiet;
  return orthonoise::run_command(app.get_subcommands().front()->get_name(), doc, seed, opts);
}
