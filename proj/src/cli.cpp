// Copyright 2026 The crossdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "crossdet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "crossdet/errors.hpp"
#include "crossdet/harmonize.hpp"
#include "crossdet/ingest.hpp"
#include "crossdet/metrics.hpp"
#include "crossdet/simulate.hpp"
#include "crossdet/text.hpp"

namespace crossdet::cli
{

namespace
{

namespace fs = std::filesystem;

/// Flag values shared by `evaluate` and `simulate`.
struct EvalFlags
{
  std::vector<std::string> metrics{"all"};
  double iou{0.7};
  double dim_iou{0.85};
  std::string depths{"30,70,70"};
  int recall_points{40};
  std::string target_class{"Car"};
  std::string out;
  std::string format;
};

void add_eval_flags(CLI::App & cmd, EvalFlags & f)
{
  cmd.add_option(
    "--metrics", f.metrics,
    "Metric rows to compute: 3d, bev, side, front, dim (length/width/height) or all")
  ->delimiter(',')->capture_default_str();
  cmd.add_option("--iou", f.iou, "IoU threshold for 3d/bev/side/front")->capture_default_str();
  cmd.add_option("--dim-iou", f.dim_iou, "IoU threshold for length/width/height")
  ->capture_default_str();
  cmd.add_option(
    "--difficulty-depths", f.depths,
    "Easy,moderate,hard maximum horizontal distance in metres")->capture_default_str();
  cmd.add_option("--recall-points", f.recall_points, "Interpolation points for AP (11 or 40)")
  ->check(CLI::IsMember({11, 40}))->capture_default_str();
  cmd.add_option("--class", f.target_class, "Class to evaluate")->capture_default_str();
  cmd.add_option("--out", f.out, "Write the report to this file");
  cmd.add_option(
    "--format", f.format,
    "Report format: table, csv or json-like (default: table on stdout, csv for --out)")
  ->check(CLI::IsMember({"table", "csv", "json-like"}));
}

/// Throws InputError on bad values; the caller maps that to a usage error.
metrics::EvalConfig eval_config_from(const EvalFlags & f)
{
  metrics::EvalConfig cfg;
  cfg.box_iou_threshold = f.iou;
  cfg.dim_iou_threshold = f.dim_iou;
  auto depths = text::parse_double_list(f.depths, 3);
  if (!depths) {
    throw InputError("--difficulty-depths needs three comma-separated numbers");
  }
  std::copy(depths->begin(), depths->end(), cfg.difficulty_depths.begin());
  cfg.recall_points = f.recall_points;
  cfg.target_class = f.target_class;
  cfg.metrics.clear();
  for (const auto & name : f.metrics) {
    if (name == "all") {
      cfg.metrics.assign(metrics::kAllMetrics.begin(), metrics::kAllMetrics.end());
    } else if (name == "dim") {
      for (auto k : {metrics::MetricKind::kLength, metrics::MetricKind::kWidth,
          metrics::MetricKind::kHeight})
      {
        cfg.metrics.push_back(k);
      }
    } else if (auto kind = metrics::metric_from_string(name)) {
      cfg.metrics.push_back(*kind);
    } else {
      throw InputError(
              "unknown metric '" + name + "' (valid: 3d, bev, side, front, dim, length, "
              "width, height, all)");
    }
  }
  std::sort(cfg.metrics.begin(), cfg.metrics.end());
  cfg.metrics.erase(std::unique(cfg.metrics.begin(), cfg.metrics.end()), cfg.metrics.end());
  metrics::validate(cfg);
  return cfg;
}

void emit_report(const metrics::ApReport & report, const EvalFlags & f, std::ostream & out)
{
  if (f.out.empty()) {
    const auto fmt = ingest::report_format_from_string(f.format.empty() ? "table" : f.format);
    out << ingest::write_report(report, *fmt);
    return;
  }
  out << ingest::write_report(report, ingest::ReportFormat::kTable);
  const auto fmt = ingest::report_format_from_string(f.format.empty() ? "csv" : f.format);
  ingest::write_file(f.out, ingest::write_report(report, *fmt));
}

std::string format_gap(const harmonize::SizeGap & gap)
{
  auto pct = [](double v) {
      std::string s = text::format_fixed(v, 1);
      return (v >= 0.0 && !s.starts_with('-') ? "+" : "") + s + "%";
    };
  return "width " + pct(gap.width) + "  height " + pct(gap.height) + "  length " +
         pct(gap.length);
}

std::string format_profile(const harmonize::DatasetProfile & p)
{
  std::string out = "[" + p.name + "]\n";
  auto line = [&](const char * key, double mean, double spread) {
      out += std::string(key) + " mean " + text::format_fixed(mean, 3) + " m  spread " +
        text::format_fixed(spread, 3) + " m\n";
    };
  line("width ", p.mean_width, p.spread_width);
  line("height", p.mean_height, p.spread_height);
  line("length", p.mean_length, p.spread_length);
  return out;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateFlags
{
  std::string gt;
  std::string pred;
  bool kitti_labels{false};
  std::string calib_dir;
  EvalFlags eval;
};

std::vector<fs::path> sorted_label_files(const fs::path & dir)
{
  if (!fs::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

ingest::CanonicalFile load_kitti_dir(
  const fs::path & dir, const fs::path & calib_dir, std::ostream & err)
{
  ingest::CanonicalFile file;
  std::optional<bool> scored;
  std::size_t dropped = 0;
  for (const auto & path : sorted_label_files(dir)) {
    const std::string frame = path.stem().string();
    const auto calib = ingest::parse_kitti_calib(
      ingest::read_text_file(calib_dir / (frame + ".txt")));
    ingest::KittiLabels labels;
    try {
      labels = ingest::parse_kitti_label(ingest::read_text_file(path), calib, frame);
    } catch (const ParseError & e) {
      throw ParseError(path.string() + ": " + e.what(), e.location());
    }
    dropped += labels.dropped;
    for (auto & rec : labels.records) {
      if (scored && *scored != rec.score.has_value()) {
        throw ParseError(path.string() + ": mixes ground truth and detections", 0);
      }
      scored = rec.score.has_value();
      file.records.push_back(std::move(rec));
    }
  }
  file.scored = scored.value_or(false);
  if (dropped > 0) {
    err << "warning: dropped " << dropped << " DontCare rows without dimensions in "
        << dir.string() << '\n';
  }
  return file;
}

ingest::CanonicalFile load_canonical(const std::string & path)
{
  try {
    return ingest::parse_canonical(ingest::read_text_file(path));
  } catch (const ParseError & e) {
    throw ParseError(path + ": " + e.what(), e.location());
  }
}

int cmd_evaluate(const EvaluateFlags & f, std::ostream & out, std::ostream & err)
{
  metrics::EvalConfig cfg;
  try {
    cfg = eval_config_from(f.eval);
    if (f.kitti_labels && f.calib_dir.empty()) {
      throw InputError("--kitti-labels requires --calib-dir");
    }
  } catch (const InputError & e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  ingest::CanonicalFile gt_file;
  ingest::CanonicalFile pred_file;
  if (f.kitti_labels) {
    gt_file = load_kitti_dir(f.gt, f.calib_dir, err);
    pred_file = load_kitti_dir(f.pred, f.calib_dir, err);
  } else {
    gt_file = load_canonical(f.gt);
    pred_file = load_canonical(f.pred);
  }
  if (gt_file.scored) {
    throw ParseError(f.gt + ": ground truth records must not carry a score", 0);
  }
  if (!pred_file.scored && !pred_file.records.empty()) {
    throw ParseError(f.pred + ": prediction records need a score", 0);
  }
  const auto report = metrics::evaluate(
    ingest::to_gt_frames(gt_file), ingest::to_pred_frames(pred_file), cfg);
  emit_report(report, f.eval, out);
  return kOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateFlags
{
  std::string source{"waymo"};
  std::string target{"kitti"};
  double alpha{1.0};
  int frames{500};
  std::uint64_t seed{42};
  double spread{harmonize::kDefaultRelativeSpread};
  double noise{0.1};
  std::string cars{"4,12"};
  std::string yaw_model{"road"};
  std::string export_dir;
  EvalFlags eval;
};

int cmd_simulate(const SimulateFlags & f, std::ostream & out, std::ostream & err)
{
  simulate::SimConfig sim;
  metrics::EvalConfig cfg;
  try {
    cfg = eval_config_from(f.eval);
    sim.source_profile = harmonize::with_relative_spread(
      harmonize::builtin_profile(f.source), f.spread);
    sim.target_profile = harmonize::with_relative_spread(
      harmonize::builtin_profile(f.target), f.spread);
    sim.overfit_alpha = f.alpha;
    sim.frames = f.frames;
    sim.seed = f.seed;
    sim.center_noise = f.noise;
    sim.yaw_noise = 0.2 * f.noise;
    sim.yaw_model = f.yaw_model == "uniform" ? simulate::YawModel::kUniform :
      simulate::YawModel::kRoadAligned;
    auto cars = text::parse_double_list(f.cars, 2);
    if (!cars) {
      throw InputError("--cars-per-frame needs two comma-separated integers");
    }
    sim.cars_min = static_cast<int>((*cars)[0]);
    sim.cars_max = static_cast<int>((*cars)[1]);
    sim.class_label = cfg.target_class;
    simulate::validate(sim);
  } catch (const InputError & e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const auto result = simulate::run_experiment(sim, cfg);
  out << "simulation: " << f.source << " -> " << f.target << ", alpha "
      << text::format_double(f.alpha) << ", " << f.frames << " frames, seed " << f.seed << '\n';
  out << "size gap (source vs generated ground truth): " << format_gap(result.realized_gap)
      << '\n';
  emit_report(result.report, f.eval, out);

  if (!f.export_dir.empty()) {
    const fs::path dir(f.export_dir);
    if (!fs::is_directory(dir)) {
      throw IoError("export directory does not exist: " + dir.string());
    }
    std::ostringstream gt;
    ingest::write_canonical(gt, result.gt_frames);
    ingest::write_file(dir / "gt.txt", gt.str());
    std::ostringstream pred;
    ingest::write_canonical(pred, result.pred_frames);
    ingest::write_file(dir / "pred.txt", pred.str());
    ingest::write_file(
      dir / "sim.cfg", harmonize::format_key_values(simulate::to_key_values(sim)));
  }
  return kOk;
}

// --- harmonize -------------------------------------------------------------

struct HarmonizeFlags
{
  std::string gt;
  std::string pred;
  std::vector<std::string> clouds;
  std::string out_dir;
  std::string range{"-75.2,-75.2,-2,75.2,75.2,4"};
  double shift_z{0.0};
  std::string voxel_size{"0.1,0.1,0.15"};
  std::string target_class{"Car"};
};

int cmd_harmonize(const HarmonizeFlags & f, std::ostream & out, std::ostream & err)
{
  harmonize::HarmonizeConfig cfg;
  try {
    auto range = text::parse_double_list(f.range, 6);
    auto voxel = text::parse_double_list(f.voxel_size, 3);
    if (!range || !voxel) {
      throw InputError("--range needs 6 and --voxel-size 3 comma-separated numbers");
    }
    std::copy(range->begin(), range->end(), cfg.point_range.begin());
    std::copy(voxel->begin(), voxel->end(), cfg.voxel_size.begin());
    cfg.vertical_shift = f.shift_z;
    harmonize::validate(cfg);
    if (f.gt.empty() && f.clouds.empty()) {
      throw InputError("nothing to do: pass --gt and/or --cloud");
    }
    if (!f.pred.empty() && f.gt.empty()) {
      throw InputError("--pred requires --gt (frames are filtered by ground truth)");
    }
  } catch (const InputError & e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const fs::path dir(f.out_dir);
  if (!fs::is_directory(dir)) {
    throw IoError("output directory does not exist: " + dir.string());
  }

  if (!f.gt.empty()) {
    const auto gt_in = ingest::to_gt_frames(load_canonical(f.gt));
    const auto gt = harmonize::shift_vertical(
      harmonize::filter_frames_without_class(gt_in, f.target_class), cfg.vertical_shift);
    std::ostringstream gt_text;
    ingest::write_canonical(gt_text, gt);
    ingest::write_file(dir / "gt.txt", gt_text.str());
    out << "gt: kept " << gt.size() << " of " << gt_in.size() << " frames containing "
        << f.target_class << '\n';
    if (!f.pred.empty()) {
      auto preds = ingest::to_pred_frames(load_canonical(f.pred));
      std::erase_if(preds, [&](const auto & kv) {return gt.count(kv.first) == 0;});
      std::ostringstream pred_text;
      ingest::write_canonical(pred_text, harmonize::shift_vertical(preds, cfg.vertical_shift));
      ingest::write_file(dir / "pred.txt", pred_text.str());
      out << "pred: kept " << preds.size() << " frames\n";
    }
  }
  for (const auto & cloud_path : f.clouds) {
    ingest::PointCloud cloud;
    try {
      cloud = ingest::read_pointcloud(ingest::read_binary_file(cloud_path));
    } catch (const ParseError & e) {
      throw ParseError(cloud_path + ": " + e.what(), e.location());
    }
    const auto clipped = harmonize::clip_range(cloud, cfg);
    const fs::path target = dir / fs::path(cloud_path).filename();
    if (fs::exists(target) && fs::equivalent(target, cloud_path)) {
      throw IoError("refusing to overwrite input " + cloud_path);
    }
    ingest::write_file(target, ingest::write_pointcloud(clipped));
    out << fs::path(cloud_path).filename().string() << ": kept " << clipped.size() << " of "
        << cloud.size() << " points\n";
  }
  ingest::write_file(
    dir / "harmonize.cfg", harmonize::format_key_values(harmonize::to_key_values(cfg)));
  return kOk;
}

// --- stats -----------------------------------------------------------------

struct StatsFlags
{
  std::string source;
  std::string target;
  std::string gt;
  std::string target_class{"Car"};
};

harmonize::DatasetProfile load_profile(const std::string & name_or_path, const std::string & cls)
{
  const auto & builtin = harmonize::builtin_profiles();
  if (builtin.count(name_or_path) != 0) {
    return builtin.at(name_or_path);
  }
  if (!fs::exists(name_or_path)) {
    std::string names;
    for (const auto & [name, p] : builtin) {
      names += (names.empty() ? "" : ", ") + name;
    }
    throw IoError("'" + name_or_path + "' is neither a built-in profile (" + names + ") nor a file");
  }
  return harmonize::size_statistics(
    ingest::to_gt_frames(load_canonical(name_or_path)), cls, fs::path(name_or_path).filename().string());
}

int cmd_stats(const StatsFlags & f, std::ostream & out, std::ostream & err)
{
  std::vector<std::string> inputs;
  for (const auto * s : {&f.gt, &f.source, &f.target}) {
    if (!s->empty()) {
      inputs.push_back(*s);
    }
  }
  if (inputs.empty() || inputs.size() > 2 || (!f.gt.empty() && !f.source.empty())) {
    err << "error: pass --gt, or --source with optional --target\n";
    return kUsage;
  }
  std::vector<harmonize::DatasetProfile> profiles;
  for (const auto & in : inputs) {
    profiles.push_back(load_profile(in, f.target_class));
    out << format_profile(profiles.back());
  }
  if (profiles.size() == 2) {
    out << "gap " << profiles[0].name << " -> " << profiles[1].name << ": "
        << format_gap(harmonize::percentage_gap(profiles[0], profiles[1])) << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Cross-domain 3D detection evaluation: 3D/BEV/side-view/front-view and "
    "per-dimension AP, dataset harmonization and size-gap simulation"};
  app.name("crossdet");
  app.require_subcommand(1);

  EvaluateFlags ev;
  auto * evaluate = app.add_subcommand("evaluate", "Evaluate predictions against ground truth");
  evaluate->add_option("--gt", ev.gt, "Ground truth (canonical file or KITTI label dir)")
  ->required();
  evaluate->add_option("--pred", ev.pred, "Predictions (canonical file or KITTI label dir)")
  ->required();
  evaluate->add_flag("--kitti-labels", ev.kitti_labels, "--gt/--pred are KITTI label dirs");
  evaluate->add_option("--calib-dir", ev.calib_dir, "KITTI calib dir (one <frame>.txt each)");
  add_eval_flags(*evaluate, ev.eval);

  SimulateFlags sim;
  auto * simulate = app.add_subcommand("simulate", "Run the synthetic size-gap experiment");
  simulate->add_option("--source", sim.source, "Training-domain profile")->capture_default_str();
  simulate->add_option("--target", sim.target, "Evaluation-domain profile")
  ->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Overfit blend: 1 = source mean sizes, 0 = exact")
  ->capture_default_str();
  simulate->add_option("--frames", sim.frames, "Number of frames")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--spread", sim.spread, "Size spread as a fraction of each mean")
  ->capture_default_str();
  simulate->add_option(
    "--noise", sim.noise, "Centre jitter std in metres (yaw jitter is 0.2 rad per metre)")
  ->capture_default_str();
  simulate->add_option("--cars-per-frame", sim.cars, "min,max cars per frame")
  ->capture_default_str();
  simulate->add_option("--yaw-model", sim.yaw_model, "road (0 or pi plus jitter) or uniform")
  ->check(CLI::IsMember({"road", "uniform"}))->capture_default_str();
  simulate->add_option("--export-dir", sim.export_dir, "Write gt.txt, pred.txt and sim.cfg here");
  add_eval_flags(*simulate, sim.eval);

  HarmonizeFlags hz;
  auto * harmonize = app.add_subcommand(
    "harmonize", "Shift, range-clip and class-filter labels and point clouds");
  harmonize->add_option("--gt", hz.gt, "Canonical ground truth");
  harmonize->add_option("--pred", hz.pred, "Canonical predictions");
  harmonize->add_option("--cloud", hz.clouds, "Point cloud .bin file (repeatable)");
  harmonize->add_option("--out", hz.out_dir, "Existing output directory")->required();
  harmonize->add_option("--range", hz.range, "x0,y0,z0,x1,y1,z1 in metres")
  ->capture_default_str();
  harmonize->add_option("--shift-z", hz.shift_z,
    "Metres added to every z (suggested: kitti 1.6, nuscenes 1.8, waymo 0)")
  ->capture_default_str();
  harmonize->add_option("--voxel-size", hz.voxel_size, "Recorded in harmonize.cfg only")
  ->capture_default_str();
  harmonize->add_option("--class", hz.target_class, "Drop frames without this class")
  ->capture_default_str();

  StatsFlags st;
  auto * stats = app.add_subcommand("stats", "Size profiles and percentage gaps");
  stats->add_option("--gt", st.gt, "Canonical ground truth to profile");
  stats->add_option("--source", st.source, "Built-in profile name or canonical file");
  stats->add_option("--target", st.target, "Built-in profile name or canonical file");
  stats->add_option("--class", st.target_class, "Class to profile")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*evaluate) {
      return cmd_evaluate(ev, out, err);
    }
    if (*simulate) {
      return cmd_simulate(sim, out, err);
    }
    if (*harmonize) {
      return cmd_harmonize(hz, out, err);
    }
    return cmd_stats(st, out, err);
  } catch (const IoError & e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError & e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const EmptyInput & e) {
    err << "error: empty input: " << e.what() << '\n';
    return kParse;
  } catch (const InputError & e) {
    err << "error: " << e.what() << '\n';
    return kInputMismatch;
  } catch (const Error & e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const fs::filesystem_error & e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace crossdet::cli
