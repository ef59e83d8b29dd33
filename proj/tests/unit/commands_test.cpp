/*
 * Copyright 2026 The monoloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "monoloc/commands.hpp"
#include "oracles.hpp"

using namespace monoloc;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kData = MONOLOC_TEST_DATA_DIR;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "monoloc_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json LoadJson(const fs::path& p) { return json::parse(Slurp(p)); }

RunConfig MiniConfig() {
  RunConfig cfg;
  cfg.gt_dir = kData / "mini" / "label";
  cfg.calib_dir = kData / "mini" / "calib";
  cfg.split_file = kData / "mini" / "split.txt";
  return cfg;
}

// Copies every ground-truth file with a score appended; `edit` may rewrite
// individual rows first.
template <typename Edit>
fs::path MakePredictions(const std::string& name, Edit edit) {
  const fs::path dir = Scratch(name);
  for (const auto& entry : fs::directory_iterator(kData / "mini" / "label")) {
    std::ifstream in(entry.path());
    std::ofstream out(dir / entry.path().filename());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      out << edit(entry.path().stem().string(), line) << " 1.000000\n";
    }
  }
  return dir;
}

std::string Identity(const std::string&, const std::string& line) { return line; }

}  // namespace

TEST_CASE("validate: well-formed corpus") {
  auto cfg = MiniConfig();
  cfg.out = Scratch("validate_ok");
  std::ostringstream log;
  CHECK(cmd_validate(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "validation.json");
  CHECK(j["frames"] == 3);
  CHECK(j["objects"] == 7);
  CHECK(j["errors"].empty());
  CHECK(j["counts"]["Car"]["easy"] == 2);
  CHECK(j["counts"]["Car"]["moderate"] == 0);
  CHECK(j["counts"]["Car"]["hard"] == 1);
  CHECK(j["counts"]["Car"]["ignored"] == 1);
  CHECK(j["counts"]["Pedestrian"]["moderate"] == 1);
  CHECK(j["counts"]["Cyclist"]["easy"] == 1);
  CHECK(j["counts"]["DontCare"]["ignored"] == 1);
}

TEST_CASE("validate: one truncated line") {
  RunConfig cfg;
  cfg.gt_dir = kData / "truncated" / "label";
  cfg.calib_dir = kData / "truncated" / "calib";
  cfg.split_file = kData / "truncated" / "split.txt";
  const auto summary = validate_corpus(cfg);
  REQUIRE(summary.errors.size() == 1);
  CHECK(summary.errors[0].line == 2);
  CHECK(summary.errors[0].file.find("000000.txt") != std::string::npos);
  CHECK(summary.objects == 2);
  std::ostringstream log;
  CHECK(cmd_validate(cfg, log) == kExitInputError);
}

TEST_CASE("validate: empty split and missing directory") {
  auto cfg = MiniConfig();
  cfg.split_file = kData / "empty_split.txt";
  std::ostringstream log;
  CHECK(cmd_validate(cfg, log) == kExitOk);
  CHECK(validate_corpus(cfg).frames == 0);

  cfg.gt_dir = kData / "does_not_exist";
  CHECK(cmd_validate(cfg, log) == kExitInputError);
}

TEST_CASE("eval: predictions equal to ground truth") {
  auto cfg = MiniConfig();
  cfg.pred_dir = MakePredictions("pred_perfect", Identity);
  cfg.out = Scratch("eval_perfect");
  std::ostringstream log;
  REQUIRE(cmd_eval(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "report.json");
  CHECK(j["frames"] == 3);
  for (const char* metric : {"3d", "bev"}) {
    for (const char* tier : {"easy", "moderate", "hard"}) {
      for (const char* t : {"0.30", "0.50", "0.70"}) {
        CHECK(j["ap"][metric][tier][t] == 1.0);
      }
    }
  }
  CHECK(j["ground_truths"]["easy"] == 2);
  CHECK(j["ground_truths"]["hard"] == 3);
  CHECK(j["localization"]["ra_u"] == 1.0);
  CHECK(j["localization"]["ra_v"] == 1.0);
  CHECK(j["localization"]["ra_z"] == 1.0);
  CHECK(j["localization"]["count"] == 3);
  CHECK(fs::exists(cfg.out / "pr_curves.csv"));
  CHECK(fs::exists(cfg.out / "depth_bins.csv"));
  CHECK(Slurp(cfg.out / "missing_predictions.log").empty());
}

TEST_CASE("eval: no predictions at all") {
  auto cfg = MiniConfig();
  cfg.pred_dir = Scratch("pred_empty");
  cfg.out = Scratch("eval_empty");
  std::ostringstream log;
  REQUIRE(cmd_eval(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "report.json");
  for (const char* metric : {"3d", "bev"}) {
    for (const char* tier : {"easy", "moderate", "hard"}) {
      for (const char* t : {"0.30", "0.50", "0.70"}) CHECK(j["ap"][metric][tier][t] == 0.0);
    }
  }
  CHECK(j["localization"]["count"] == 0);
  const std::string missing = Slurp(cfg.out / "missing_predictions.log");
  CHECK(oracle::split_fields(missing).size() == 3);
}

TEST_CASE("eval: one perturbed depth") {
  auto cfg = MiniConfig();
  cfg.pred_dir = MakePredictions("pred_depth", [](const std::string& id, const std::string& line) {
    if (id != "000002" || line.rfind("Car", 0) != 0) return line;
    auto f = oracle::split_fields(line);
    f[13] = "10.30";  // ground truth 9.80
    std::string out;
    for (const auto& s : f) out += (out.empty() ? "" : " ") + s;
    return out;
  });
  cfg.out = Scratch("eval_depth");
  std::ostringstream log;
  REQUIRE(cmd_eval(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "report.json");
  REQUIRE(j["localization"]["count"] == 3);
  const double expected = 1.0 - (0.5 / 9.8) / 3.0;
  CHECK(j["localization"]["ra_z"].get<double>() == doctest::Approx(expected).epsilon(1e-6));
  CHECK(j["localization"]["ra_u"] == 1.0);
}

TEST_CASE("eval: missing ground truth is fatal, missing predictions are not") {
  const fs::path split = Scratch("split_extra") / "split.txt";
  std::ofstream(split) << "0\n1\n2\n3\n";
  auto cfg = MiniConfig();
  cfg.split_file = split;
  cfg.pred_dir = Scratch("pred_none");
  cfg.out = Scratch("eval_missing_gt");
  std::ostringstream log;
  CHECK(cmd_eval(cfg, log) == kExitInputError);
}

TEST_CASE("eval: reruns are byte-identical") {
  auto cfg = MiniConfig();
  cfg.pred_dir = MakePredictions("pred_rerun", Identity);
  std::ostringstream log;
  const fs::path a = Scratch("eval_rerun_a");
  const fs::path b = Scratch("eval_rerun_b");
  cfg.out = a;
  REQUIRE(cmd_eval(cfg, log) == kExitOk);
  cfg.out = b;
  REQUIRE(cmd_eval(cfg, log) == kExitOk);
  for (const char* f : {"report.json", "pr_curves.csv", "depth_bins.csv"}) {
    const std::string first = Slurp(a / f);
    CHECK_FALSE(first.empty());
    CHECK(first == Slurp(b / f));
  }
}

TEST_CASE("run configuration checks") {
  RunConfig cfg;
  cfg.thresholds = {0.0};
  CHECK_THROWS(cfg.validate());
  cfg.thresholds = {0.5, 1.2};
  CHECK_THROWS(cfg.validate());
  cfg.thresholds = {1.0};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("train-toy: noiseless seeds converge in both arms") {
  RunConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.num_seeds = 5;
  cfg.seed = 1;
  cfg.out = Scratch("toy_noiseless");
  std::ostringstream log;
  REQUIRE(cmd_train_toy(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "train_toy.json");
  CHECK(j["seeds"].size() == 5);
  for (const char* arm : {"regularized", "unregularized"}) {
    CHECK(j[arm]["runs_not_reaching_tolerance"] == 0);
    for (const auto& r : j[arm]["reports"]) CHECK(r["final_l1"].get<double>() < 1e-3);
  }
}

TEST_CASE("train-toy: zero beta gives identical arms") {
  RunConfig cfg;
  cfg.loss.beta = 0.0;
  cfg.num_seeds = 2;
  cfg.epochs = 500;
  cfg.out = Scratch("toy_beta0");
  std::ostringstream log;
  REQUIRE(cmd_train_toy(cfg, log) == kExitOk);
  const auto j = LoadJson(cfg.out / "train_toy.json");
  const auto& reg = j["regularized"]["reports"];
  const auto& plain = j["unregularized"]["reports"];
  REQUIRE(reg.size() == plain.size());
  for (std::size_t i = 0; i < reg.size(); ++i) {
    CHECK(reg[i]["loss_curve"] == plain[i]["loss_curve"]);
    CHECK(reg[i]["final_l1"] == plain[i]["final_l1"]);
    CHECK(reg[i]["neighbor_order_violations"] == plain[i]["neighbor_order_violations"]);
    CHECK(reg[i]["epochs_to_tolerance"] == plain[i]["epochs_to_tolerance"]);
  }
}

TEST_CASE("train-toy: divergence exits with the numeric status") {
  RunConfig cfg;
  cfg.lr = 1e4;
  cfg.num_seeds = 1;
  cfg.epochs = 200;
  cfg.out = Scratch("toy_diverge");
  std::ostringstream log;
  CHECK(cmd_train_toy(cfg, log) == kExitNumericError);
  CHECK(log.str().find("seed") != std::string::npos);
}

TEST_CASE("iou-oracle: identical pairs and determinism") {
  RunConfig cfg;
  cfg.pairs = 20;
  cfg.samples = 200000;
  cfg.seed = 4;
  cfg.out = Scratch("oracle_a");
  std::ostringstream log;
  REQUIRE(cmd_iou_oracle(cfg, log) == kExitOk);
  const std::string first = Slurp(cfg.out / "iou_oracle.json");
  const auto j = json::parse(first);
  CHECK(j["max_abs_deviation"].get<double>() <= 0.01);
  std::size_t identical = 0;
  for (const auto& e : j["entries"]) {
    if (!e["identical"].get<bool>()) continue;
    ++identical;
    CHECK(e["abs_deviation"] == 0.0);
  }
  CHECK(identical == 2);
  cfg.out = Scratch("oracle_b");
  REQUIRE(cmd_iou_oracle(cfg, log) == kExitOk);
  CHECK(Slurp(cfg.out / "iou_oracle.json") == first);
}

TEST_CASE("box pair sampler") {
  const auto a = sample_box_pairs(30, 9);
  const auto b = sample_box_pairs(30, 9);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a.center.x == b[i].a.center.x);
    CHECK(a[i].identical == (i % 10 == 0));
  }
}
