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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "monoloc/error.hpp"
#include "monoloc/kitti_io.hpp"
#include "oracles.hpp"

using namespace monoloc;

namespace {

const char* kCarLine =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59";

ObjectAnnotation MakeCar(double top, double bottom, double trunc, int occ) {
  ObjectAnnotation a;
  a.class_name = "Car";
  a.truncation = trunc;
  a.occlusion = occ;
  a.box2d = {100.0, top, 200.0, bottom};
  a.dims = {1.5, 1.6, 3.9};
  a.location = {1.0, 1.7, 20.0};
  return a;
}

}  // namespace

TEST_CASE("ground-truth line parses field by field") {
  const auto fields = oracle::split_fields(kCarLine);
  REQUIRE(fields.size() == 15);
  const auto rows = parse_label_text(kCarLine);
  REQUIRE(rows.size() == 1);
  const auto& a = rows[0];
  CHECK(a.class_name == fields[0]);
  CHECK(a.truncation == std::stod(fields[1]));
  CHECK(a.occlusion == std::stoi(fields[2]));
  CHECK(a.alpha == std::stod(fields[3]));
  CHECK(a.box2d.left == std::stod(fields[4]));
  CHECK(a.box2d.bottom == std::stod(fields[7]));
  CHECK(a.dims.height == std::stod(fields[8]));
  CHECK(a.dims.length == std::stod(fields[10]));
  CHECK(a.location.x == std::stod(fields[11]));
  CHECK(a.location.z == 46.70);
  CHECK(a.rotation_y == -1.59);
  CHECK_FALSE(a.score.has_value());
}

TEST_CASE("prediction line carries a trailing score") {
  const auto rows = parse_label_text(std::string(kCarLine) + " 0.97\n");
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].score.has_value());
  CHECK(*rows[0].score == 0.97);
}

TEST_CASE("empty input and blank lines") {
  CHECK(parse_label_text("").empty());
  const auto rows = parse_label_text(std::string("\n  \n") + kCarLine + "\n\n");
  CHECK(rows.size() == 1);
}

TEST_CASE("unknown classes and DontCare rows are kept") {
  const auto rows = parse_label_text(
      "Tram 0.00 0 0.1 1 2 30 40 3.0 2.5 12.0 1 1.7 30 0.2\n"
      "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].class_name == "Tram");
  CHECK(rows[1].is_dont_care());
  CHECK(rows[1].dims.height == -1.0);
  CHECK(rows[1].location.z == -1000.0);
  CHECK_FALSE(check_annotation(rows[1]).has_value());
}

TEST_CASE("field-count errors carry the line number") {
  const std::string short_line = "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70";
  for (const std::string& bad : {short_line, std::string(kCarLine) + " 0.9 1.0"}) {
    try {
      parse_label_text(std::string(kCarLine) + "\n" + bad + "\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.field() == 0);
    }
  }
}

TEST_CASE("numeric errors carry line and field") {
  try {
    parse_label_text("Car 0.00 0 -1.58 587.01 17x.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.field() == 6);
  }
  CHECK_THROWS_AS(parse_label_text("Car 0.00 zero -1.58 1 2 3 4 1 1 1 0 0 1 0"), ParseError);
}

TEST_CASE("calibration P2 extraction") {
  const auto calib = parse_calib_text(
      "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"
      "P2: 700 0 600 0 0 700 170 0 0 0 1 0\n"
      "R0_rect: 1 0 0 0 1 0 0 0 1\n");
  CHECK(calib.focal() == 700.0);
  CHECK(calib.theta() == 600.0);
  CHECK(calib.phi() == 170.0);
  CHECK_NOTHROW(validate_calibration(calib, 1242, 375));
  CHECK_THROWS_AS(validate_calibration(calib, 500, 375), ValidationError);
}

TEST_CASE("calibration errors") {
  CHECK_THROWS_AS(parse_calib_text("P2: 700 0 600 0 0 700 170 0 0 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_calib_text("P2: -1 0 600 0 0 700 170 0 0 0 1 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_calib_text("P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_calib_text("P2: 700 0 6oo 0 0 700 170 0 0 0 1 0\n"), ParseError);
}

TEST_CASE("prediction writer") {
  CHECK(write_prediction_file({}).empty());

  auto rows = parse_label_text(std::string(kCarLine) + " 0.97");
  const std::string text = write_prediction_file(rows);
  CHECK(oracle::split_fields(text).size() == 16);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);

  std::vector<ObjectAnnotation> three;
  for (int i = 0; i < 3; ++i) {
    auto a = rows[0];
    a.location.z = 10.0 + i;
    three.push_back(a);
  }
  const auto back = parse_label_text(write_prediction_file(three));
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i].location.z == 10.0 + i);

  rows[0].score.reset();
  CHECK_THROWS_AS(write_prediction_file(rows), ValidationError);
}

TEST_CASE("write then parse is the identity at 6 decimals") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> occ(0, 3);
  std::vector<ObjectAnnotation> in;
  for (int i = 0; i < 200; ++i) {
    ObjectAnnotation a;
    a.class_name = i % 3 ? "Car" : "Van";
    a.truncation = std::abs(u(rng)) / 50.0;
    a.occlusion = occ(rng);
    a.alpha = u(rng) / 20.0;
    a.box2d = {u(rng), u(rng), u(rng), u(rng)};
    a.dims = {u(rng), u(rng), u(rng)};
    a.location = {u(rng), u(rng), u(rng)};
    a.rotation_y = u(rng) / 20.0;
    a.score = std::abs(u(rng)) / 50.0;
    in.push_back(a);
  }
  const auto out = parse_label_text(write_prediction_file(in));
  REQUIRE(out.size() == in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    CHECK(out[i].class_name == in[i].class_name);
    CHECK(out[i].occlusion == in[i].occlusion);
    CHECK(std::abs(out[i].location.z - in[i].location.z) <= 5e-7);
    CHECK(std::abs(*out[i].score - *in[i].score) <= 5e-7);
    CHECK(std::abs(out[i].box2d.left - in[i].box2d.left) <= 5e-7);
  }
}

TEST_CASE("difficulty tiers") {
  CHECK(assign_difficulty(MakeCar(100, 150, 0.0, 0)) == Difficulty::kEasy);
  CHECK(assign_difficulty(MakeCar(100, 130, 0.2, 1)) == Difficulty::kModerate);
  CHECK(assign_difficulty(MakeCar(100, 120, 0.0, 0)) == Difficulty::kIgnored);
  CHECK(assign_difficulty(MakeCar(100, 150, 0.4, 2)) == Difficulty::kHard);
  CHECK(assign_difficulty(MakeCar(100, 150, 0.6, 0)) == Difficulty::kIgnored);
  CHECK(assign_difficulty(MakeCar(100, 150, 0.0, 3)) == Difficulty::kIgnored);
  // Strictly greater than the height floor.
  CHECK(assign_difficulty(MakeCar(100, 140, 0.0, 0)) == Difficulty::kModerate);
}

TEST_CASE("difficulty is monotone under relaxation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> height(10.0, 60.0);
  std::uniform_real_distribution<double> trunc(0.0, 0.7);
  std::uniform_int_distribution<int> occ(0, 3);
  for (int i = 0; i < 2000; ++i) {
    const auto a = MakeCar(100.0, 100.0 + height(rng), trunc(rng), occ(rng));
    auto relaxed = a;
    relaxed.box2d.bottom += height(rng) / 4.0;
    relaxed.truncation = std::max(0.0, a.truncation - trunc(rng) / 2.0);
    relaxed.occlusion = std::max(0, a.occlusion - occ(rng));
    CHECK(static_cast<int>(assign_difficulty(relaxed)) <= static_cast<int>(assign_difficulty(a)));
  }
}

TEST_CASE("split lists") {
  CHECK(parse_split_text("").empty());
  const auto ids = parse_split_text("0\n000012\n  7481 \n");
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == "000000");
  CHECK(ids[1] == "000012");
  CHECK(ids[2] == "007481");
  CHECK_THROWS_AS(parse_split_text("abc\n"), ParseError);
  CHECK(format_frame_id(42) == "000042");
  CHECK_NOTHROW(DatasetSplit::Make({"000001", "000002"}, {"000003"}));
  CHECK_THROWS_AS(DatasetSplit::Make({"000001", "000002"}, {"000002"}), ValidationError);
}
