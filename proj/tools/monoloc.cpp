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

// monoloc: KITTI validation/evaluation and the locality-regulariser toy
// experiment.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monoloc/commands.hpp"

namespace {

void AddLossFlags(CLI::App* app, monoloc::RunConfig& cfg) {
  app->add_option("--lambda", cfg.loss.lambda, "Similarity depth bandwidth (m^2)")
      ->capture_default_str();
  app->add_option("--alpha", cfg.loss.alpha, "2D box loss weight")->capture_default_str();
  app->add_option("--beta", cfg.loss.beta, "Regulariser weight")->capture_default_str();
  app->add_option("--gamma", cfg.loss.gamma, "Coarse depth loss weight")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monocular 3D localisation toolkit"};
  app.require_subcommand(1);
  monoloc::RunConfig cfg;
  int ap_mode = 11;

  auto* validate = app.add_subcommand("validate", "Parse and check a KITTI corpus");
  auto* eval = app.add_subcommand("eval", "AP3D/APBEV and localisation accuracy");
  auto* train = app.add_subcommand("train-toy", "Paired regulariser experiment");
  auto* oracle = app.add_subcommand("iou-oracle", "Check 3D IoU against Monte Carlo");

  for (auto* sub : {validate, eval}) {
    sub->add_option("--gt-dir", cfg.gt_dir, "Ground-truth label directory")->required();
    sub->add_option("--calib-dir", cfg.calib_dir, "Calibration directory");
    sub->add_option("--split", cfg.split_file, "Frame id list (default: all labels)");
  }
  eval->add_option("--pred-dir", cfg.pred_dir, "Prediction directory")->required();
  eval->add_option("--thresholds", cfg.thresholds, "IoU thresholds")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--ap-mode", ap_mode, "AP interpolation points")
      ->check(CLI::IsMember({11, 40}))
      ->capture_default_str();
  eval->add_option("--class", cfg.class_name, "Evaluated class")->capture_default_str();

  AddLossFlags(train, cfg);
  train->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  train->add_option("--lr", cfg.lr, "Learning rate")->capture_default_str();
  train->add_flag("--no-reg", cfg.no_reg, "Run only the unregularised arm");
  train->add_option("--num-seeds", cfg.num_seeds, "Number of consecutive seeds")
      ->capture_default_str();
  train->add_option("--objects", cfg.n_objects, "Objects per scene")->capture_default_str();
  train->add_option("--feature-dim", cfg.feature_dim, "Feature dimension")
      ->capture_default_str();
  train->add_option("--noise", cfg.noise_sigma, "Feature noise sigma")->capture_default_str();

  oracle->add_option("--pairs", cfg.pairs, "Random box pairs")->capture_default_str();
  oracle->add_option("--samples", cfg.samples, "Monte Carlo samples per pair")
      ->capture_default_str();

  for (auto* sub : {validate, eval, train, oracle}) {
    auto* out = sub->add_option("--out", cfg.out, "Output directory");
    if (sub != validate) out->required();
  }
  for (auto* sub : {train, oracle}) {
    sub->add_option("--seed", cfg.seed, "Base random seed")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? monoloc::kExitOk : monoloc::kExitInputError;
  }
  cfg.ap_mode = ap_mode == 40 ? monoloc::ApMode::k40Point : monoloc::ApMode::k11Point;

  if (*validate) return monoloc::cmd_validate(cfg, std::cerr);
  if (*eval) return monoloc::cmd_eval(cfg, std::cerr);
  if (*train) return monoloc::cmd_train_toy(cfg, std::cerr);
  return monoloc::cmd_iou_oracle(cfg, std::cerr);
}
