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

// Batch commands behind the `monoloc` executable. Each command reads its
// inputs, writes its outputs under RunConfig::out and returns a process exit
// code: 0 success, 1 validation or input error, 2 numeric failure.

#pragma once

#include <cstdint>
#include <filesystem>
#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoloc/evaluation.hpp"
#include "monoloc/geometry.hpp"
#include "monoloc/losses.hpp"

namespace monoloc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericError = 2;

struct RunConfig {
  std::filesystem::path gt_dir;
  std::filesystem::path pred_dir;
  std::filesystem::path calib_dir;
  std::filesystem::path split_file;  // empty: every *.txt in gt_dir
  std::filesystem::path out;         // output directory

  std::vector<double> thresholds{0.3, 0.5, 0.7};
  ApMode ap_mode = ApMode::k11Point;
  std::string class_name = "Car";

  LossConfig loss;
  int epochs = 20000;
  double lr = 1e-3;
  bool no_reg = false;
  std::uint64_t seed = 1;
  std::size_t num_seeds = 20;
  std::size_t n_objects = 50;
  std::size_t feature_dim = 8;
  double noise_sigma = 0.1;

  std::size_t pairs = 200;
  std::size_t samples = 1000000;

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

struct LocatedError {
  std::string file;
  std::size_t line = 0;
  std::size_t field = 0;
  std::string message;
};

struct ValidationSummary {
  std::size_t frames = 0;
  std::size_t objects = 0;
  // class -> counts indexed by Difficulty
  std::map<std::string, std::array<std::size_t, 4>> counts;
  std::vector<LocatedError> errors;

  nlohmann::ordered_json to_json() const;
};

// Frame ids from the split file, or the sorted stems of gt_dir/*.txt.
std::vector<std::string> resolve_frames(const RunConfig& cfg);

ValidationSummary validate_corpus(const RunConfig& cfg);

int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_eval(const RunConfig& cfg, std::ostream& log);
int cmd_train_toy(const RunConfig& cfg, std::ostream& log);
int cmd_iou_oracle(const RunConfig& cfg, std::ostream& log);

struct BoxPair {
  Box3D a;
  Box3D b;
  bool identical = false;
};

/// Random car-sized box pairs; b is a perturbed copy of a, and every tenth
/// pair is an exact duplicate.
std::vector<BoxPair> sample_box_pairs(std::size_t count, std::uint64_t seed);

}  // namespace monoloc
