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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "orthonoise/commands.hpp"

namespace orthonoise {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("orthonoise_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& cmd, const json& doc, const std::string& sub, std::string* err_text = nullptr) {
    std::ostringstream log, err;
    const int code = run_command(cmd, doc, std::nullopt, {dir_ / sub, true}, log, err);
    if (err_text) *err_text = err.str();
    return code;
  }

  json read_json(const std::string& rel) const {
    std::ifstream is(dir_ / rel);
    return json::parse(is);
  }

  std::string read_text(const std::string& rel) const {
    std::ifstream is(dir_ / rel);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

json base(const json& boundary, double eps = 0.3) {
  return {{"problem",
           {{"n", 2},
            {"p", 2},
            {"epsilon", eps},
            {"domain", {{"kind", "ball"}, {"center", {0, 0}}, {"radius", 1}}},
            {"boundary", boundary}}}};
}

json quadratic(double eps = 0.3) { return base({{"family", "quadratic"}, {"center", {0, 0}}}, eps); }
json affine(double eps = 0.3) { return base({{"family", "affine"}, {"a", {1, 0}}, {"b", 0}}, eps); }

TEST(Config, RoundTripIsIdentity) {
  for (const auto& entry : fs::directory_iterator(ORTHONOISE_CONFIGS)) {
    std::ifstream is(entry.path());
    const RunConfig a = parse_config(json::parse(is));
    const json once = to_json(a);
    const json twice = to_json(parse_config(once));
    EXPECT_EQ(once, twice) << entry.path();
    EXPECT_EQ(once.dump(), twice.dump()) << entry.path();
  }
}

TEST(Config, RoundTripCoversEveryFamily) {
  std::vector<json> docs;
  docs.push_back(base({{"family", "constant"}, {"value", 1.5}}));
  docs.push_back(base({{"family", "cone"}, {"vertex", {0.1, 0.2}}, {"slope", 2}, {"offset", -1}}));
  docs.push_back(base({{"family", "tabulated"},
                       {"points", {{0, 0}, {1, 0}, {0, 1}}},
                       {"values", {0, 1, 2}},
                       {"lipschitz", 2}}));
  json alpha = quadratic();
  alpha["problem"]["p"] = "alpha_zero";
  docs.push_back(alpha);
  json box = quadratic();
  box["problem"]["domain"] = {{"kind", "box"}, {"lo", {-1, -1}}, {"hi", {1, 1}}};
  box["numerics"] = {{"h", 0.05}, {"directions", 24}, {"quadrature", 6}, {"workers", 3}};
  box["game"] = {{"first", {{"kind", "pull_toward"}, {"target", {1, 1}}}}, {"second", {{"kind", "uniform_random"}}}};
  docs.push_back(box);
  for (const auto& d : docs) {
    const json once = to_json(parse_config(d));
    EXPECT_EQ(once, to_json(parse_config(once))) << d.dump();
  }
  EXPECT_FALSE(parse_config(alpha).p.has_value());
  EXPECT_EQ(to_json(parse_config(alpha))["problem"]["p"], "alpha_zero");
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

TEST(Config, InvalidConfigNamesKeyPath) {
  json d = quadratic();
  d["problem"]["domain"]["radius"] = -1;
  EXPECT_EQ(error_path(d), "problem.domain.radius");

  d = quadratic();
  d["numerics"] = {{"tolerance", 1e-7}};
  EXPECT_EQ(error_path(d), "numerics.tolerance");

  d = quadratic();
  d["problem"]["p"] = 1.0;
  EXPECT_EQ(error_path(d), "problem.p");

  d = quadratic();
  d["problem"]["epsilon"] = 0;
  EXPECT_EQ(error_path(d), "problem.epsilon");

  d = quadratic();
  d["game"] = {{"runs", 10}};
  EXPECT_EQ(error_path(d), "game.runs");

  d = quadratic();
  d["game"] = {{"points", {{0, 0}, {0.1}}}};
  EXPECT_EQ(error_path(d), "game.points[1]");

  d = quadratic();
  d["game"] = {{"first", {{"kind", "clever"}}}};
  EXPECT_EQ(error_path(d), "game.first.kind");

  d = quadratic();
  d["sweep"] = {{"axis", "n"}};
  EXPECT_EQ(error_path(d), "sweep.axis");

  d = quadratic();
  d["extra"] = 1;
  EXPECT_EQ(error_path(d), "extra");
}

TEST_F(Cli, SolveConstantHasZeroGap) {
  EXPECT_EQ(run("solve", base({{"family", "constant"}, {"value", 1}}), "c"), kExitOk);
  const json s = read_json("c/summary.json");
  EXPECT_EQ(s["gap"].get<double>(), 0.0);
  EXPECT_TRUE(s["certified"].get<bool>());
  EXPECT_TRUE(fs::exists(dir_ / "c/lower.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "c/upper.csv"));
}

TEST_F(Cli, SolveAffineCertifies) {
  EXPECT_EQ(run("solve", affine(), "a"), kExitOk);
  EXPECT_LE(read_json("a/summary.json")["gap"].get<double>(), 1e-6);
}

TEST_F(Cli, SolveSummaryEmbedsConfigAndSeed) {
  json d = affine();
  d["game"] = {{"seed", 77}};
  EXPECT_EQ(run("solve", d, "a"), kExitOk);
  const json s = read_json("a/summary.json");
  EXPECT_EQ(s["seed"].get<std::uint64_t>(), 77u);
  EXPECT_EQ(s["config"], to_json(parse_config(d)));
}

TEST_F(Cli, SolveMaxIterOneDoesNotConverge) {
  json d = quadratic();
  d["numerics"] = {{"max_iter", 1}};
  EXPECT_EQ(run("solve", d, "q"), kExitNonConvergence);
  const json s = read_json("q/summary.json");
  EXPECT_FALSE(s["converged"].get<bool>());
  EXPECT_GT(s["residual_lower"].get<double>(), 1e-7);
}

TEST_F(Cli, InvalidConfigExitsFour) {
  json d = quadratic();
  d["game"] = {{"runs", 10}};
  std::string err;
  EXPECT_EQ(run("game", d, "g", &err), kExitInvalidConfig);
  EXPECT_NE(err.find("game.runs"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "g"));
}

TEST_F(Cli, GreedyGameWithoutSolutionExitsThree) {
  json d = quadratic();
  d["game"] = {{"solution_dir", (dir_ / "nowhere").string()}};
  EXPECT_EQ(run("game", d, "g"), kExitMissingArtifact);
}

TEST_F(Cli, GameStartingInStripReturnsBoundaryValue) {
  json d = affine();
  d["game"] = {{"runs", 100},
               {"first", {{"kind", "uniform_random"}}},
               {"second", {{"kind", "uniform_random"}}},
               {"points", {{1.1, 0.0}, {0.0, -1.2}}}};
  EXPECT_EQ(run("game", d, "g"), kExitOk);
  const json e = read_json("g/game_estimates.json")["estimates"];
  EXPECT_EQ(e[0]["estimate"]["mean"].get<double>(), 1.1);
  EXPECT_EQ(e[0]["estimate"]["std_error"].get<double>(), 0.0);
  EXPECT_EQ(e[1]["estimate"]["mean"].get<double>(), 0.0);
  EXPECT_EQ(e[1]["estimate"]["std_error"].get<double>(), 0.0);
}

TEST_F(Cli, GameOutsideThickenedDomainIsInvalid) {
  json d = affine();
  d["game"] = {{"first", {{"kind", "uniform_random"}}}, {"second", {{"kind", "uniform_random"}}}, {"points", {{2, 0}}}};
  std::string err;
  EXPECT_EQ(run("game", d, "g", &err), kExitInvalidConfig);
  EXPECT_NE(err.find("game.points[0]"), std::string::npos);
}

TEST_F(Cli, GameWithSameSeedIsByteIdentical) {
  json d = quadratic(0.5);
  EXPECT_EQ(run("solve", d, "sol"), kExitOk);
  d["game"] = {{"runs", 400},
               {"seed", 5},
               {"points", {{0, 0}, {0.3, -0.2}}},
               {"solution_dir", (dir_ / "sol").string()},
               {"trajectories", 4}};
  EXPECT_EQ(run("game", d, "a"), kExitOk);
  EXPECT_EQ(run("game", d, "b"), kExitOk);
  EXPECT_EQ(read_text("a/game_estimates.json"), read_text("b/game_estimates.json"));
  EXPECT_EQ(read_text("a/trajectories.jsonl"), read_text("b/trajectories.jsonl"));
  EXPECT_FALSE(read_text("a/trajectories.jsonl").empty());

  std::ostringstream log, err;
  EXPECT_EQ(run_command("game", d, 6, {dir_ / "c", true}, log, err), kExitOk);
  EXPECT_NE(read_text("a/game_estimates.json"), read_text("c/game_estimates.json"));
  EXPECT_EQ(read_json("c/game_estimates.json")["seed"].get<std::uint64_t>(), 6u);
}

TEST_F(Cli, VerifyNegativeControlFails) {
  json d = quadratic(0.5);
  d["verify"] = {{"games", false}, {"negative_control", true}};
  EXPECT_EQ(run("verify", d, "v"), kExitCheckFailure);
  const json checks = read_json("v/checks.json");
  bool max_principle_failed = false;
  for (const auto& c : checks)
    if (c["id"] == "max_principle") max_principle_failed = c["status"] == "fail";
  EXPECT_TRUE(max_principle_failed);
}

TEST_F(Cli, VerifyWithoutControlPasses) {
  json d = quadratic(0.5);
  d["verify"] = {{"games", false}};
  EXPECT_EQ(run("verify", d, "v"), kExitOk);
  for (const auto& c : read_json("v/checks.json")) EXPECT_EQ(c["status"], "pass") << c["id"];
}

TEST_F(Cli, VerifyUndersampledGamesAreInconclusive) {
  json d = quadratic(0.5);
  d["game"] = {{"points", {{0, 0}}}};
  d["verify"] = {{"bracket_runs", 100}, {"supermartingale_trajectories", 10}, {"termination_runs", 100}};
  EXPECT_EQ(run("verify", d, "v"), kExitOk);
  std::map<std::string, std::string> status;
  for (const auto& c : read_json("v/checks.json")) status[c["id"]] = c["status"];
  EXPECT_EQ(status["uniqueness_bracket"], "inconclusive");
  EXPECT_EQ(status["supermartingale"], "inconclusive");
}

TEST_F(Cli, SingleValueSweepMatchesSolve) {
  json d = quadratic();
  EXPECT_EQ(run("solve", d, "s"), kExitOk);
  d["sweep"] = {{"axis", "epsilon"}, {"values", {0.3}}, {"reference", false}};
  EXPECT_EQ(run("sweep", d, "w"), kExitOk);
  const json s = read_json("s/summary.json");
  std::istringstream csv(read_text("w/sweep.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
  ASSERT_GE(cells.size(), 9u);
  EXPECT_EQ(cells[2], "ok");
  EXPECT_EQ(std::stod(cells[3]), s["gap"].get<double>());
  EXPECT_EQ(std::stod(cells[4]), s["residual_lower"].get<double>());
  EXPECT_EQ(std::stod(cells[5]), s["residual_upper"].get<double>());
  EXPECT_EQ(std::stoul(cells[7]), s["iterations_lower"].get<std::size_t>());
  EXPECT_EQ(std::stoul(cells[8]), s["iterations_upper"].get<std::size_t>());
}

TEST_F(Cli, EpsilonSweepOnAffineDataCertifiesEveryRow) {
  json d = affine();
  d["numerics"] = {{"h", 0.025}};
  d["sweep"] = {{"axis", "epsilon"}, {"values", {0.4, 0.2, 0.1}}};
  EXPECT_EQ(run("sweep", d, "w"), kExitOk);
  std::istringstream csv(read_text("w/sweep.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
    EXPECT_EQ(cells[2], "ok") << line;
    EXPECT_LE(std::stod(cells[3]), 1e-6) << line;
    EXPECT_LE(std::stod(cells[9]), 1e-6) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream csv(text);
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(Cli, DirectionSweepRefinedResidualDecreases) {
  json d = quadratic();
  d["sweep"] = {{"axis", "M"}, {"values", {8, 16, 32}}, {"reference", false}};
  EXPECT_EQ(run("sweep", d, "w"), kExitOk);
  const auto rows = csv_rows(read_text("w/sweep.csv"));
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 12u);
    EXPECT_LT(std::stod(rows[i][11]), std::stod(rows[i - 1][11])) << "M=" << rows[i][1];
  }
}

TEST_F(Cli, SweepRecordsFailingRows) {
  json d = quadratic();
  d["numerics"] = {{"max_iter", 3}};
  d["sweep"] = {{"axis", "epsilon"}, {"values", {0.4, -1}}, {"reference", false}};
  EXPECT_EQ(run("sweep", d, "w"), kExitCheckFailure);
  const std::string text = read_text("w/sweep.csv");
  EXPECT_NE(text.find("epsilon,0.40000000000000002,not_converged"), std::string::npos) << text;
  EXPECT_NE(text.find("epsilon,-1,error"), std::string::npos) << text;
}

TEST_F(Cli, UnknownCommandIsInvalid) {
  std::string err;
  EXPECT_EQ(run("plot", quadratic(), "x", &err), kExitInvalidConfig);
}

}  // namespace
}  // namespace orthonoise
