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

#include "monoloc/kitti_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "monoloc/error.hpp"

namespace monoloc {

namespace {

constexpr std::size_t kLabelFields = 15;
constexpr std::size_t kPredictionFields = 16;

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double ParseReal(std::string_view token, std::size_t line, std::size_t field) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("expected a real number, got '" + std::string(token) + "'",
                     line, field);
  }
  return value;
}

int ParseInt(std::string_view token, std::size_t line, std::size_t field) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("expected an integer, got '" + std::string(token) + "'",
                     line, field);
  }
  return value;
}

ObjectAnnotation ParseLabelLine(const std::vector<std::string_view>& f,
                                std::size_t line) {
  if (f.size() != kLabelFields && f.size() != kPredictionFields) {
    throw ParseError("expected 15 or 16 fields, got " + std::to_string(f.size()),
                     line);
  }
  ObjectAnnotation a;
  a.class_name = std::string(f[0]);
  a.truncation = ParseReal(f[1], line, 2);
  a.occlusion = ParseInt(f[2], line, 3);
  a.alpha = ParseReal(f[3], line, 4);
  a.box2d = {ParseReal(f[4], line, 5), ParseReal(f[5], line, 6),
             ParseReal(f[6], line, 7), ParseReal(f[7], line, 8)};
  a.dims = {ParseReal(f[8], line, 9), ParseReal(f[9], line, 10),
            ParseReal(f[10], line, 11)};
  a.location = {ParseReal(f[11], line, 12), ParseReal(f[12], line, 13),
                ParseReal(f[13], line, 14)};
  a.rotation_y = ParseReal(f[14], line, 15);
  if (f.size() == kPredictionFields) a.score = ParseReal(f[15], line, 16);
  return a;
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CameraCalibration CameraCalibration::FromIntrinsics(double focal, double theta,
                                                    double phi) {
  CameraCalibration c;
  c.p2 = {focal, 0.0, theta, 0.0, 0.0, focal, phi, 0.0, 0.0, 0.0, 1.0, 0.0};
  return c;
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kModerate: return "moderate";
    case Difficulty::kHard: return "hard";
    case Difficulty::kIgnored: return "ignored";
  }
  return "ignored";
}

DatasetSplit DatasetSplit::Make(std::vector<std::string> train,
                                std::vector<std::string> val) {
  std::unordered_set<std::string> seen(train.begin(), train.end());
  for (const auto& id : val) {
    if (seen.count(id)) throw ValidationError("frame " + id + " is in both train and val");
  }
  return DatasetSplit{std::move(train), std::move(val)};
}

std::vector<ObjectAnnotation> parse_label_file(std::istream& in) {
  std::vector<ObjectAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    out.push_back(ParseLabelLine(fields, line_no));
  }
  return out;
}

std::vector<ObjectAnnotation> parse_label_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_label_file(in);
}

CameraCalibration parse_calib_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty() || fields[0] != "P2:") continue;
    if (fields.size() != 13) {
      throw ParseError("P2 needs 12 values, got " + std::to_string(fields.size() - 1),
                       line_no);
    }
    CameraCalibration calib;
    for (std::size_t k = 0; k < 12; ++k) {
      calib.p2[k] = ParseReal(fields[k + 1], line_no, k + 2);
    }
    if (!(calib.focal() > 0.0)) {
      throw ValidationError("focal length must be positive, got " +
                            std::to_string(calib.focal()));
    }
    return calib;
  }
  throw ParseError("no P2: line in calibration file", 0);
}

CameraCalibration parse_calib_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_calib_file(in);
}

void validate_calibration(const CameraCalibration& calib, double image_width,
                          double image_height) {
  if (!(calib.focal() > 0.0)) throw ValidationError("focal length must be positive");
  if (calib.theta() < 0.0 || calib.theta() > image_width ||
      calib.phi() < 0.0 || calib.phi() > image_height) {
    throw ValidationError("principal point lies outside the image");
  }
}

void write_prediction_file(const std::vector<ObjectAnnotation>& annotations,
                           std::ostream& out) {
  char buf[512];
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    if (!a.score) {
      throw ValidationError("annotation " + std::to_string(i) + " has no score");
    }
    std::snprintf(buf, sizeof(buf),
                  "%s %.6f %d %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f "
                  "%.6f %.6f %.6f\n",
                  a.class_name.c_str(), a.truncation, a.occlusion, a.alpha,
                  a.box2d.left, a.box2d.top, a.box2d.right, a.box2d.bottom,
                  a.dims.height, a.dims.width, a.dims.length, a.location.x,
                  a.location.y, a.location.z, a.rotation_y, *a.score);
    out << buf;
  }
}

std::string write_prediction_file(const std::vector<ObjectAnnotation>& annotations) {
  std::ostringstream out;
  write_prediction_file(annotations, out);
  return out.str();
}

Difficulty assign_difficulty(const ObjectAnnotation& a) {
  struct Tier {
    Difficulty level;
    double min_height;
    double max_truncation;
    int max_occlusion;
  };
  static constexpr Tier kTiers[] = {
      {Difficulty::kEasy, 40.0, 0.15, 0},
      {Difficulty::kModerate, 25.0, 0.30, 1},
      {Difficulty::kHard, 25.0, 0.50, 2},
  };
  const double height = a.box2d.height();
  for (const auto& t : kTiers) {
    if (height > t.min_height && a.truncation <= t.max_truncation &&
        a.occlusion >= 0 && a.occlusion <= t.max_occlusion) {
      return t.level;
    }
  }
  return Difficulty::kIgnored;
}

std::optional<std::string> check_annotation(const ObjectAnnotation& a) {
  if (!(a.box2d.right > a.box2d.left) || !(a.box2d.bottom > a.box2d.top)) {
    return "2D box has non-positive extent";
  }
  if (a.is_dont_care()) return std::nullopt;
  if (a.truncation < 0.0 || a.truncation > 1.0) return "truncation outside [0, 1]";
  if (a.occlusion < 0 || a.occlusion > 3) return "occlusion code outside {0,1,2,3}";
  if (std::abs(a.alpha) > std::numbers::pi || std::abs(a.rotation_y) > std::numbers::pi) {
    return "angle outside [-pi, pi]";
  }
  if (a.class_name == "Car" &&
      !(a.dims.height > 0.0 && a.dims.width > 0.0 && a.dims.length > 0.0)) {
    return "non-positive 3D dimensions";
  }
  return std::nullopt;
}

std::string format_frame_id(unsigned long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06lu", index);
  return buf;
}

std::vector<std::string> parse_split_file(std::istream& in) {
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 1) throw ParseError("expected one frame id per line", line_no);
    std::string_view tok = fields[0];
    const bool numeric = std::all_of(tok.begin(), tok.end(), [](char c) {
      return c >= '0' && c <= '9';
    });
    if (numeric && tok.size() <= 6) {
      ids.push_back(format_frame_id(std::stoul(std::string(tok))));
    } else if (numeric) {
      ids.emplace_back(tok);
    } else {
      throw ParseError("frame id must be numeric, got '" + std::string(tok) + "'",
                       line_no, 1);
    }
  }
  return ids;
}

std::vector<std::string> parse_split_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_split_file(in);
}

std::vector<ObjectAnnotation> read_label_file(const std::filesystem::path& path) {
  return parse_label_text(ReadAll(path));
}

CameraCalibration read_calib_file(const std::filesystem::path& path) {
  return parse_calib_text(ReadAll(path));
}

std::vector<std::string> read_split_file(const std::filesystem::path& path) {
  return parse_split_text(ReadAll(path));
}

}  // namespace monoloc
