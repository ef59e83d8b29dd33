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

#include "monoloc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "monoloc/error.hpp"
#include "monoloc/json_util.hpp"
#include "monoloc/kitti_io.hpp"
#include "monoloc/toy_trainer.hpp"

namespace fs = std::filesystem;

namespace monoloc {

namespace {

constexpr Difficulty kEvalTiers[] = {Difficulty::kEasy, Difficulty::kModerate,
                                     Difficulty::kHard};
constexpr IouMetric kMetrics[] = {IouMetric::k3D, IouMetric::kBev};

std::string ThresholdKey(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

std::string Fixed6(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void EnsureOutDir(const fs::path& out) {
  if (out.empty()) throw ValidationError("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out.string());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

// indent < 0 writes compact JSON (used for the per-epoch loss curves).
void WriteJson(const fs::path& path, const nlohmann::ordered_json& j, int indent = 2) {
  WriteText(path, j.dump(indent) + "\n");
}

void RequireDir(const fs::path& dir, const char* flag) {
  if (dir.empty()) throw ValidationError(std::string(flag) + " is required");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error("cannot read directory " + dir.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string ApModeName(ApMode m) { return m == ApMode::k11Point ? "11" : "40"; }

}  // namespace

void RunConfig::validate() const {
  if (thresholds.empty()) throw ValidationError("at least one IoU threshold is required");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("IoU thresholds must lie in (0, 1]");
  }
  try {
    loss.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (epochs < 1) throw ValidationError("--epochs must be >= 1");
  if (!(lr > 0.0)) throw ValidationError("--lr must be positive");
  if (num_seeds < 1) throw ValidationError("--num-seeds must be >= 1");
  if (n_objects < 1) throw ValidationError("--objects must be >= 1");
  if (feature_dim < 2) throw ValidationError("--feature-dim must be >= 2");
  if (!(noise_sigma >= 0.0)) throw ValidationError("--noise must be >= 0");
}

std::vector<std::string> resolve_frames(const RunConfig& cfg) {
  if (!cfg.split_file.empty()) return read_split_file(cfg.split_file);
  RequireDir(cfg.gt_dir, "--gt-dir");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(cfg.gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

nlohmann::ordered_json ValidationSummary::to_json() const {
  nlohmann::ordered_json j;
  j["frames"] = frames;
  j["objects"] = objects;
  auto& c = j["counts"] = nlohmann::ordered_json::object();
  for (const auto& [name, per] : counts) {
    auto& row = c[name];
    for (int d = 0; d < 4; ++d) {
      row[std::string(to_string(static_cast<Difficulty>(d)))] = per[static_cast<std::size_t>(d)];
    }
  }
  auto& errs = j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : errors) {
    errs.push_back({{"file", e.file}, {"line", e.line}, {"field", e.field}, {"message", e.message}});
  }
  return j;
}

ValidationSummary validate_corpus(const RunConfig& cfg) {
  RequireDir(cfg.gt_dir, "--gt-dir");
  if (!cfg.calib_dir.empty()) RequireDir(cfg.calib_dir, "--calib-dir");
  ValidationSummary summary;
  const auto frames = resolve_frames(cfg);
  summary.frames = frames.size();
  for (const auto& id : frames) {
    const fs::path label_path = cfg.gt_dir / (id + ".txt");
    std::string text;
    try {
      text = ReadFile(label_path);
    } catch (const Error& e) {
      summary.errors.push_back({label_path.string(), 0, 0, e.what()});
      continue;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      try {
        const auto rows = parse_label_text(line);
        if (rows.empty()) continue;
        const auto& a = rows.front();
        if (auto problem = check_annotation(a)) {
          summary.errors.push_back({label_path.string(), line_no, 0, *problem});
          continue;
        }
        ++summary.objects;
        auto& per = summary.counts[a.class_name];
        per[static_cast<std::size_t>(a.is_dont_care() ? Difficulty::kIgnored
                                                      : assign_difficulty(a))]++;
      } catch (const ParseError& e) {
        std::string msg = e.what();
        const auto pos = msg.rfind(": ");
        summary.errors.push_back({label_path.string(), line_no, e.field(),
                                  pos == std::string::npos ? msg : msg.substr(pos + 2)});
      }
    }
    if (!cfg.calib_dir.empty()) {
      const fs::path calib_path = cfg.calib_dir / (id + ".txt");
      try {
        (void)read_calib_file(calib_path);
      } catch (const ParseError& e) {
        summary.errors.push_back({calib_path.string(), e.line(), e.field(), e.what()});
      } catch (const Error& e) {
        summary.errors.push_back({calib_path.string(), 0, 0, e.what()});
      }
    }
  }
  return summary;
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  try {
    const ValidationSummary summary = validate_corpus(cfg);
    for (const auto& e : summary.errors) {
      log << e.file << ":" << e.line;
      if (e.field > 0) log << ":" << e.field;
      log << ": " << e.message << "\n";
    }
    log << summary.frames << " frames, " << summary.objects << " objects, "
        << summary.errors.size() << " errors\n";
    if (!cfg.out.empty()) {
      EnsureOutDir(cfg.out);
      WriteJson(cfg.out / "validation.json", summary.to_json());
    }
    return summary.errors.empty() ? kExitOk : kExitInputError;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

namespace {

struct Frame {
  std::string id;
  std::vector<ObjectAnnotation> gts;
  std::vector<ObjectAnnotation> preds;
};

std::vector<Frame> LoadFrames(const RunConfig& cfg, std::string& missing_log) {
  RequireDir(cfg.gt_dir, "--gt-dir");
  RequireDir(cfg.pred_dir, "--pred-dir");
  if (!cfg.calib_dir.empty()) RequireDir(cfg.calib_dir, "--calib-dir");
  std::vector<Frame> frames;
  for (const auto& id : resolve_frames(cfg)) {
    Frame f;
    f.id = id;
    const fs::path gt_path = cfg.gt_dir / (id + ".txt");
    if (!fs::exists(gt_path)) throw Error("missing ground truth for frame " + id);
    f.gts = read_label_file(gt_path);
    const fs::path pred_path = cfg.pred_dir / (id + ".txt");
    if (fs::exists(pred_path)) {
      f.preds = read_label_file(pred_path);
    } else {
      missing_log += id + "\n";
    }
    if (!cfg.calib_dir.empty()) (void)read_calib_file(cfg.calib_dir / (id + ".txt"));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

int cmd_eval(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    EnsureOutDir(cfg.out);
    std::string missing;
    const std::vector<Frame> frames = LoadFrames(cfg, missing);
    if (!missing.empty()) {
      log << "frames without predictions (scored as empty) listed in "
          << (cfg.out / "missing_predictions.log").string() << "\n";
    }
    WriteText(cfg.out / "missing_predictions.log", missing);

    nlohmann::ordered_json report;
    report["frames"] = frames.size();
    report["class"] = cfg.class_name;
    report["ap_mode"] = ApModeName(cfg.ap_mode);
    auto& thr = report["thresholds"] = nlohmann::ordered_json::array();
    for (double t : cfg.thresholds) thr.push_back(fixed6(t));

    std::string pr_csv = "metric,difficulty,threshold,recall,precision\n";
    auto& ap = report["ap"];
    auto& n_gt_json = report["ground_truths"];
    for (IouMetric metric : kMetrics) {
      const std::string mname(to_string(metric));
      for (Difficulty tier : kEvalTiers) {
        const std::string dname(to_string(tier));
        for (double t : cfg.thresholds) {
          MatchOptions opts{t, metric, tier, cfg.class_name};
          std::vector<MatchResult> matches;
          std::size_t n_gt = 0;
          for (const auto& f : frames) {
            matches.push_back(match_frame(f.preds, f.gts, opts, f.id));
            n_gt += matches.back().valid_ground_truths;
          }
          n_gt_json[dname] = n_gt;
          if (n_gt == 0) {
            ap[mname][dname][ThresholdKey(t)] = nullptr;
            continue;
          }
          const auto curve = average_precision(matches, n_gt, cfg.ap_mode);
          ap[mname][dname][ThresholdKey(t)] = fixed6(curve.ap);
          for (const auto& p : curve.points) {
            pr_csv += mname + "," + dname + "," + ThresholdKey(t) + "," + Fixed6(p.recall) +
                      "," + Fixed6(p.precision) + "\n";
          }
        }
      }
    }

    // Localisation over BEV matches at the loosest threshold, all valid tiers.
    const double loosest = *std::min_element(cfg.thresholds.begin(), cfg.thresholds.end());
    MatchOptions loc_opts{loosest, IouMetric::kBev, Difficulty::kHard, cfg.class_name};
    std::vector<CenterPair> centers;
    for (const auto& f : frames) {
      const MatchResult m = match_frame(f.preds, f.gts, loc_opts, f.id);
      for (const auto& p : m.pairs) {
        centers.push_back({f.gts[p.ground_truth].location, f.preds[p.prediction].location});
      }
    }
    auto& loc = report["localization"];
    loc["matching"] = {{"metric", "bev"}, {"difficulty", "hard"}, {"threshold", fixed6(loosest)}};
    std::string bins_csv = "lo,hi,count,ra_u,ra_v,ra_z\n";
    if (centers.empty()) {
      loc["count"] = 0;
      loc["ra_u"] = nullptr;
      loc["ra_v"] = nullptr;
      loc["ra_z"] = nullptr;
      loc["depth_bins"] = nlohmann::ordered_json::array();
    } else {
      const LocalizationReport lr = localization_report(centers);
      loc["count"] = lr.count;
      loc["ra_u"] = fixed6(lr.ra_u);
      loc["ra_v"] = fixed6(lr.ra_v);
      loc["ra_z"] = fixed6(lr.ra_z);
      auto& bins = loc["depth_bins"] = nlohmann::ordered_json::array();
      for (const auto& b : lr.depth_bins) {
        bins.push_back({{"lo", fixed6(b.lo)}, {"hi", fixed6(b.hi)}, {"count", b.count},
                        {"ra_u", fixed6(b.ra_u)}, {"ra_v", fixed6(b.ra_v)},
                        {"ra_z", fixed6(b.ra_z)}});
        bins_csv += Fixed6(b.lo) + "," + Fixed6(b.hi) + "," + std::to_string(b.count) + "," +
                    Fixed6(b.ra_u) + "," + Fixed6(b.ra_v) + "," + Fixed6(b.ra_z) + "\n";
      }
    }

    WriteJson(cfg.out / "report.json", report);
    WriteText(cfg.out / "pr_curves.csv", pr_csv);
    WriteText(cfg.out / "depth_bins.csv", bins_csv);
    log << "evaluated " << frames.size() << " frames\n";
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_train_toy(const RunConfig& cfg, std::ostream& log) {
  PairedConfig pc;
  try {
    cfg.validate();
    EnsureOutDir(cfg.out);
    pc.n_objects = cfg.n_objects;
    pc.feature_dim = cfg.feature_dim;
    pc.noise_sigma = cfg.noise_sigma;
    pc.loss = cfg.loss;
    pc.train.lr = cfg.lr;
    pc.train.epochs = cfg.epochs;
    pc.run_regularized = !cfg.no_reg;
    for (std::size_t k = 0; k < cfg.num_seeds; ++k) pc.seeds.push_back(cfg.seed + k);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  PairedExperiment exp;
  try {
    exp = run_paired_experiment(pc);
  } catch (const DivergenceError& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumericError;
  }

  nlohmann::ordered_json j;
  j["seeds"] = pc.seeds;
  if (exp.regularized) j["regularized"] = to_json(*exp.regularized);
  j["unregularized"] = to_json(exp.unregularized);
  auto& s = j["summary"];
  const auto& plain = exp.unregularized;
  s["unregularized_mean_violations"] = fixed6(plain.mean_violations);
  s["unregularized_mean_epochs_to_tolerance"] = fixed6(plain.mean_epochs_to_tolerance);
  if (exp.regularized) {
    const auto& reg = *exp.regularized;
    s["regularized_mean_violations"] = fixed6(reg.mean_violations);
    s["regularized_mean_epochs_to_tolerance"] = fixed6(reg.mean_epochs_to_tolerance);
    const double ratio = plain.mean_epochs_to_tolerance > 0.0
                             ? reg.mean_epochs_to_tolerance / plain.mean_epochs_to_tolerance
                             : std::numeric_limits<double>::quiet_NaN();
    s["epochs_to_tolerance_ratio"] = fixed6(ratio);
    s["violations_not_worse"] = reg.mean_violations <= plain.mean_violations;
    s["convergence_within_10_percent"] =
        reg.mean_epochs_to_tolerance <= 1.1 * plain.mean_epochs_to_tolerance;
    log << "violations: regularized " << reg.mean_violations << " vs "
        << plain.mean_violations << "; epochs to tolerance: " << reg.mean_epochs_to_tolerance
        << " vs " << plain.mean_epochs_to_tolerance << "\n";
  }
  try {
    WriteJson(cfg.out / "train_toy.json", j, -1);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

std::vector<BoxPair> sample_box_pairs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<BoxPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    BoxPair p;
    p.a.center = {uniform(-10.0, 10.0), uniform(0.5, 2.5), uniform(5.0, 50.0)};
    p.a.dims = {uniform(1.2, 2.0), uniform(1.4, 2.0), uniform(3.0, 5.0)};
    p.a.yaw = uniform(-std::numbers::pi, std::numbers::pi);
    if (i % 10 == 0) {
      p.b = p.a;
      p.identical = true;
    } else {
      p.b.center = {p.a.center.x + 0.7 * normal(rng), p.a.center.y + 0.3 * normal(rng),
                    p.a.center.z + 0.7 * normal(rng)};
      p.b.dims = {p.a.dims.height * uniform(0.8, 1.2), p.a.dims.width * uniform(0.8, 1.2),
                  p.a.dims.length * uniform(0.8, 1.2)};
      p.b.yaw = p.a.yaw + uniform(-0.6, 0.6);
    }
    pairs.push_back(p);
  }
  return pairs;
}

int cmd_iou_oracle(const RunConfig& cfg, std::ostream& log) {
  try {
    EnsureOutDir(cfg.out);
    if (cfg.pairs < 1 || cfg.samples < 1) throw ValidationError("--pairs and --samples must be >= 1");
    const auto pairs = sample_box_pairs(cfg.pairs, cfg.seed);
    double max_dev = 0.0;
    double sum_dev = 0.0;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double analytic = iou_3d(pairs[i].a, pairs[i].b);
      const double sampled = monte_carlo_iou_3d(pairs[i].a, pairs[i].b, cfg.samples, cfg.seed + i);
      const double dev = std::abs(analytic - sampled);
      max_dev = std::max(max_dev, dev);
      sum_dev += dev;
      entries.push_back({{"index", i}, {"identical", pairs[i].identical},
                         {"iou", fixed6(analytic)}, {"monte_carlo", fixed6(sampled)},
                         {"abs_deviation", fixed6(dev)}});
    }
    nlohmann::ordered_json j;
    j["pairs"] = pairs.size();
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["max_abs_deviation"] = fixed6(max_dev);
    j["mean_abs_deviation"] = fixed6(sum_dev / static_cast<double>(pairs.size()));
    j["entries"] = std::move(entries);
    WriteJson(cfg.out / "iou_oracle.json", j);
    log << "max |iou - monte carlo| = " << max_dev << " over " << pairs.size() << " pairs\n";
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace monoloc
