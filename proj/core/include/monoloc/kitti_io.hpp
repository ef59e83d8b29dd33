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

// KITTI object-benchmark text formats: label/prediction files, calibration
// files and frame split lists.

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monoloc {

struct PixelBox {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double height() const { return bottom - top; }
  double width() const { return right - left; }
};

struct Dimensions {
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// One row of a KITTI label or prediction file. `location` is the centre of
// the bottom face in camera coordinates.
struct ObjectAnnotation {
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  PixelBox box2d;
  Dimensions dims;
  Vec3 location;
  double rotation_y = 0.0;
  std::optional<double> score;

  bool is_dont_care() const { return class_name == "DontCare"; }
};

// Left colour camera intrinsics taken from the P2 row of a calib file.
struct CameraCalibration {
  std::array<double, 12> p2{};  // row-major 3x4

  double focal() const { return p2[0]; }
  double theta() const { return p2[2]; }  // principal point, u
  double phi() const { return p2[6]; }    // principal point, v

  // Builds a P2 with zero translation column from intrinsics.
  static CameraCalibration FromIntrinsics(double focal, double theta, double phi);
};

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2, kIgnored = 3 };

std::string_view to_string(Difficulty d);

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;

  // Throws ValidationError if the two lists share an id.
  static DatasetSplit Make(std::vector<std::string> train,
                           std::vector<std::string> val);
};

/// Parses a KITTI label (15 fields) or prediction (16 fields) file.
/// Blank lines are skipped. Any other line either becomes an annotation or
/// raises ParseError carrying its 1-based line number and, for numeric
/// failures, the 1-based field index.
std::vector<ObjectAnnotation> parse_label_file(std::istream& in);
std::vector<ObjectAnnotation> parse_label_text(std::string_view text);

/// Reads the "P2:" row. Throws ParseError when it is missing or does not
/// hold exactly 12 reals, ValidationError when the focal length is not
/// positive.
CameraCalibration parse_calib_file(std::istream& in);
CameraCalibration parse_calib_text(std::string_view text);

// Checks the principal point against a known image size.
void validate_calibration(const CameraCalibration& calib, double image_width,
                          double image_height);

/// Serialises predictions with 6 fractional digits, one 16-field line per
/// annotation. Throws ValidationError if any annotation lacks a score.
std::string write_prediction_file(const std::vector<ObjectAnnotation>& annotations);
void write_prediction_file(const std::vector<ObjectAnnotation>& annotations,
                           std::ostream& out);

// Easiest KITTI tier whose height/truncation/occlusion limits are met.
Difficulty assign_difficulty(const ObjectAnnotation& a);

// Returns a description of the first violated row invariant, if any.
std::optional<std::string> check_annotation(const ObjectAnnotation& a);

// One frame id per line; numeric ids are zero-padded to six digits.
std::vector<std::string> parse_split_file(std::istream& in);
std::vector<std::string> parse_split_text(std::string_view text);

std::string format_frame_id(unsigned long index);

// File helpers; throw Error if the file cannot be opened.
std::vector<ObjectAnnotation> read_label_file(const std::filesystem::path& path);
CameraCalibration read_calib_file(const std::filesystem::path& path);
std::vector<std::string> read_split_file(const std::filesystem::path& path);

}  // namespace monoloc
