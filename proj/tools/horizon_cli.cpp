// Command line front end: dataset annotation, metric evaluation, smoothing,
// gradient checks, synthetic data generation, training and ablations.
//
// Exit codes: 0 success, 1 check/verification failure, 2 usage/input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "horizon/checks.hpp"
#include "horizon/config.hpp"
#include "horizon/filters.hpp"
#include "horizon/io.hpp"
#include "horizon/kitti.hpp"
#include "horizon/loss.hpp"
#include "horizon/metrics.hpp"
#include "horizon/synth.hpp"
#include "horizon/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace horizon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

metrics::PredictionTrajectory trajectory_of(
    const kitti::SequenceAnnotation& ann) {
  metrics::PredictionTrajectory traj;
  traj.sequence_id = ann.sequence_id;
  for (const auto& f : ann.frames) traj.frames.emplace_back(f.frame_index, f.params);
  return traj;
}

std::vector<metrics::PredictionTrajectory> read_trajectory_dir(
    const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<metrics::PredictionTrajectory> out;
  for (const auto& f : files)
    out.push_back(trajectory_of(io::read_annotation_csv(f)));
  return out;
}

// ---- annotate ----

int cmd_annotate(const std::string& root, int camera, const std::string& out,
                 const std::string& split_spec_path, double width_override,
                 double height_override) {
  auto locations = kitti::discover_sequences(root);
  if (locations.empty()) {
    std::cerr << "no sequences found under " << root << "\n";
    return kExitUsage;
  }
  fs::create_directories(out);

  std::map<std::string, kitti::CalibChain> calib_cache;
  for (const auto& loc : locations)
    if (!calib_cache.count(loc.calib_dir.string()))
      calib_cache[loc.calib_dir.string()] = kitti::load_calib(loc.calib_dir);

  std::vector<kitti::AnnotateResult> results(locations.size());
  std::vector<std::string> failures(locations.size());

  // Sequences are independent; output ordering below stays deterministic.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(locations.size());
       ++i) {
    const auto& loc = locations[static_cast<std::size_t>(i)];
    try {
      const auto& calib = calib_cache.at(loc.calib_dir.string());
      geom::ImageDims dims = calib.dims[static_cast<std::size_t>(camera)];
      if (width_override > 0) dims.width = width_override;
      if (height_override > 0) dims.height = height_override;
      if (!(dims.width > 0) || !(dims.height > 0))
        throw BadCalibration("no S_rect_0" + std::to_string(camera) +
                             " and no --width/--height override");
      auto oxts = kitti::load_oxts(loc.oxts);
      results[static_cast<std::size_t>(i)] = kitti::annotate_sequence(
          oxts, calib, camera, dims, loc.sequence_id);
    } catch (const Error& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  }

  json per_sequence = json::object();
  std::vector<kitti::SequenceAnnotation> annotations;
  std::size_t total_frames = 0;
  std::size_t total_skipped = 0;
  bool any_failure = false;
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (!failures[i].empty()) {
      any_failure = true;
      continue;
    }
    const auto& ann = results[i].annotation;
    io::write_annotation_csv(ann, fs::path(out) / (ann.sequence_id + ".csv"));
    per_sequence[ann.sequence_id] = {
        {"frames", ann.frames.size()}, {"skipped", results[i].skipped}};
    total_frames += ann.frames.size();
    total_skipped += static_cast<std::size_t>(results[i].skipped);
    annotations.push_back(ann);
  }

  json summary;
  summary["camera"] = camera;
  summary["sequences"] = annotations.size();
  summary["frames"] = total_frames;
  summary["skipped_frames"] = total_skipped;
  summary["per_sequence"] = std::move(per_sequence);

  if (!split_spec_path.empty()) {
    kitti::SplitSpec spec = io::load_split_spec(split_spec_path);
    // sequences the spec omits are dropped (stationary near-duplicates etc.)
    std::vector<kitti::SequenceAnnotation> listed;
    for (auto& ann : annotations)
      if (spec.assignment.count(ann.sequence_id)) listed.push_back(ann);
    auto parts = kitti::apply_split(listed, spec);
    auto part_info = [](const std::vector<kitti::SequenceAnnotation>& p) {
      std::size_t frames = 0;
      for (const auto& a : p) frames += a.frames.size();
      return json{{"sequences", p.size()}, {"frames", frames}};
    };
    std::size_t split_frames = 0;
    for (const auto* p : {&parts.train, &parts.val, &parts.test})
      for (const auto& a : *p) split_frames += a.frames.size();
    summary["split"] = {{"train", part_info(parts.train)},
                        {"val", part_info(parts.val)},
                        {"test", part_info(parts.test)},
                        {"sequences", listed.size()},
                        {"frames", split_frames}};
  }

  std::ofstream sum_out(fs::path(out) / "summary.json", std::ios::binary);
  sum_out << summary.dump(2) << '\n';

  if (any_failure) {
    std::cerr << "failed sequences:\n";
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (!failures[i].empty())
        std::cerr << "  " << locations[i].sequence_id << ": " << failures[i]
                  << "\n";
    return kExitUsage;
  }
  std::cout << "annotated " << annotations.size() << " sequences, "
            << total_frames << " frames (" << total_skipped << " skipped)\n";
  return kExitOk;
}

// ---- evaluate ----

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                 double width, double height, double focal, double cx,
                 double cy, const std::string& report_path,
                 const std::string& histogram_path) {
  auto preds = read_trajectory_dir(pred_dir);
  auto gts = read_trajectory_dir(gt_dir);
  geom::ImageDims dims{width, height};
  Mat3 k = Mat3::identity();
  k(0, 0) = focal > 0 ? focal : width;
  k(1, 1) = focal > 0 ? focal : width;
  k(0, 2) = cx;
  k(1, 2) = cy;
  geom::CameraModel cam{k};

  auto report = metrics::evaluate(preds, gts, dims, cam);
  io::save_metrics_report(report, report_path);
  if (!histogram_path.empty()) {
    auto errors = metrics::pooled_horizon_errors(preds, gts, dims);
    io::write_histogram_csv(metrics::cumulative_histogram(errors),
                            histogram_path);
  }
  std::cout << "horizon_auc " << report.horizon_auc << "  mse " << report.mse
            << "  a_tv " << report.a_tv << "  pose_auc " << report.pose_auc
            << "\n";
  return kExitOk;
}

// ---- smooth ----

int cmd_smooth(const std::string& input, double alpha, double width,
               const std::string& output) {
  auto ann = io::read_annotation_csv(input);
  std::vector<geom::HorizonParams> series;
  for (const auto& f : ann.frames) series.push_back(f.params);
  auto smoothed = filters::exp_smooth(series, alpha);
  geom::ImageDims dims{width, 1.0};
  kitti::SequenceAnnotation out_ann;
  out_ann.sequence_id = ann.sequence_id;
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    kitti::AnnotatedFrame f;
    f.frame_index = ann.frames[i].frame_index;
    f.params = smoothed[i];
    f.line = geom::horizon_from_params(geom::normalized(smoothed[i]), dims);
    out_ann.frames.push_back(f);
  }
  io::write_annotation_csv(out_ann, output);
  return kExitOk;
}

// ---- gradcheck ----

int cmd_gradcheck(const std::string& variant, double tolerance,
                  std::uint64_t seed) {
  auto results = checks::gradcheck_suite(variant, tolerance, seed);
  for (const auto& r : results) {
    std::printf("%-24s max_rel_err ", r.name.c_str());
    double worst = 0.0;
    for (const auto& e : r.report.entries)
      worst = std::max(worst, e.max_rel_error);
    std::printf("%.3e  %s\n", worst, r.report.pass ? "PASS" : "FAIL");
    if (!r.report.pass)
      for (const auto& e : r.report.entries)
        if (!e.pass)
          std::printf("    %-20s %.3e\n", e.name.c_str(), e.max_rel_error);
  }
  return checks::all_pass(results) ? kExitOk : kExitCheckFailed;
}

// ---- synth ----

void write_sequence_outputs(const synth::SynthSequence& seq,
                            const synth::SynthConfig& cfg,
                            const fs::path& dir) {
  kitti::SequenceAnnotation ann;
  ann.sequence_id = seq.sequence_id;
  geom::ImageDims dims = synth::dims_of(cfg);
  for (std::size_t t = 0; t < seq.labels.size(); ++t) {
    kitti::AnnotatedFrame f;
    f.frame_index = static_cast<int>(t);
    f.params = seq.labels[t];
    f.line = geom::horizon_from_params(seq.labels[t], dims);
    ann.frames.push_back(f);
  }
  io::write_annotation_csv(ann, dir / (seq.sequence_id + ".csv"));

  std::ofstream raw(dir / (seq.sequence_id + ".f64"), std::ios::binary);
  for (const auto& frame : seq.frames)
    raw.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size() * sizeof(double)));
}

int cmd_synth(const std::string& cfg_path, const std::string& out) {
  auto cfg = config::synth_from_json(config::read_file(cfg_path));
  auto ds = synth::make_dataset(cfg);
  for (const char* split : {"train", "val", "test"})
    fs::create_directories(fs::path(out) / split);
  for (const auto& seq : ds.train)
    write_sequence_outputs(seq, cfg, fs::path(out) / "train");
  for (const auto& seq : ds.val)
    write_sequence_outputs(seq, cfg, fs::path(out) / "val");
  for (const auto& seq : ds.test)
    write_sequence_outputs(seq, cfg, fs::path(out) / "test");

  json meta;
  meta["config"] = json::parse(config::to_json(cfg));
  meta["frame_format"] =
      "raw little-endian float64, [seq_len][1][height][width] per .f64 file";
  std::ofstream meta_out(fs::path(out) / "dataset.json", std::ios::binary);
  meta_out << meta.dump(2) << '\n';
  std::cout << "wrote " << ds.train.size() << "/" << ds.val.size() << "/"
            << ds.test.size() << " train/val/test sequences to " << out
            << "\n";
  return kExitOk;
}

// ---- train ----

struct RunConfigs {
  cells::HorizonNetConfig model;
  train::TrainConfig train_cfg;
  synth::SynthConfig synth_cfg;
};

RunConfigs parse_run_configs(const std::string& path) {
  json doc = json::parse(config::read_file(path));
  RunConfigs rc;
  rc.model = config::model_from_json(doc.value("model", json::object()).dump());
  rc.train_cfg =
      config::train_from_json(doc.value("train", json::object()).dump());
  rc.synth_cfg =
      config::synth_from_json(doc.value("synth", json::object()).dump());
  return rc;
}

int cmd_train(const std::string& cfg_path, const std::string& out,
              std::uint64_t seed_override, bool has_seed) {
  RunConfigs rc = parse_run_configs(cfg_path);
  if (has_seed) rc.train_cfg.seed = seed_override;
  fs::create_directories(out);

  auto data = synth::make_dataset(rc.synth_cfg);
  cells::HorizonNet net(rc.model, rc.train_cfg.seed);
  auto history = train::train_model(net, rc.train_cfg, data);
  train::write_history_csv(history, fs::path(out) / "history.csv");
  io::save_checkpoint(net.params(), fs::path(out) / "checkpoint.json");

  auto report = train::evaluate_model(net, data.test, rc.synth_cfg);
  io::save_metrics_report(report, fs::path(out) / "report.json");

  json effective;
  effective["model"] = json::parse(config::to_json(rc.model));
  effective["train"] = json::parse(config::to_json(rc.train_cfg));
  effective["synth"] = json::parse(config::to_json(rc.synth_cfg));
  std::ofstream cfg_out(fs::path(out) / "config.json", std::ios::binary);
  cfg_out << effective.dump(2) << '\n';

  std::cout << "test horizon_auc " << report.horizon_auc << "  mse "
            << report.mse << "  a_tv " << report.a_tv << "\n";
  return kExitOk;
}

// ---- ablate ----

int cmd_ablate(const std::string& matrix_path, const std::string& out) {
  json doc = json::parse(config::read_file(matrix_path));
  RunConfigs rc;
  rc.model = config::model_from_json(doc.value("model", json::object()).dump());
  rc.train_cfg =
      config::train_from_json(doc.value("train", json::object()).dump());
  rc.synth_cfg =
      config::synth_from_json(doc.value("synth", json::object()).dump());

  std::vector<train::AblationEntry> entries;
  for (const auto& e : doc.at("entries")) {
    train::AblationEntry entry;
    entry.name = e.at("name").get<std::string>();
    entry.variant =
        cells::cell_variant_from_string(e.value("variant", "residual_dense"));
    entry.loss_mode =
        train::loss_mode_from_string(e.value("loss_mode", "adaptive"));
    entries.push_back(entry);
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& s : doc.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
  if (entries.empty() || seeds.empty())
    throw BadConfig("ablation matrix needs entries and seeds");

  fs::create_directories(out);
  auto data = synth::make_dataset(rc.synth_cfg);
  auto result =
      train::run_ablation(rc.model, rc.train_cfg, data, entries, seeds);
  train::write_ablation_csv(result, fs::path(out) / "ablation.csv");

  json summary = json::array();
  for (const auto& agg : result.aggregates) {
    summary.push_back({{"config", agg.name},
                       {"runs", agg.runs},
                       {"auc_mean", agg.auc_mean},
                       {"auc_std", agg.auc_std},
                       {"mse_mean", agg.mse_mean},
                       {"mse_std", agg.mse_std},
                       {"atv_mean", agg.atv_mean},
                       {"atv_std", agg.atv_std},
                       {"pose_auc_mean", agg.pose_auc_mean},
                       {"pose_auc_std", agg.pose_auc_std}});
    std::printf("%-24s auc %.4f +- %.4f   a_tv %.5f +- %.5f\n",
                agg.name.c_str(), agg.auc_mean, agg.auc_std, agg.atv_mean,
                agg.atv_std);
  }
  std::ofstream sum_out(fs::path(out) / "summary.json", std::ios::binary);
  sum_out << summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporally consistent horizon line estimation toolkit"};
  app.require_subcommand(1);

  // annotate
  auto* annotate = app.add_subcommand(
      "annotate", "Compute horizon ground truth from a KITTI raw directory");
  std::string kitti_root, annotate_out, split_spec;
  int camera = 2;
  double width_override = 0, height_override = 0;
  annotate->add_option("--kitti-root", kitti_root, "KITTI raw root directory")
      ->required();
  annotate->add_option("--camera", camera, "camera index 0..3")
      ->check(CLI::Range(0, 3));
  annotate->add_option("--out", annotate_out, "output directory")->required();
  annotate->add_option("--split-spec", split_spec,
                       "split spec JSON; sequences it omits are dropped");
  annotate->add_option("--width", width_override,
                       "image width override when S_rect is absent");
  annotate->add_option("--height", height_override, "image height override");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Evaluate prediction CSVs against ground-truth CSVs");
  std::string pred_dir, gt_dir, report_path = "report.json", histogram_path;
  double width = 0, height = 0, focal = 0, cx = -1, cy = -1;
  evaluate->add_option("--pred", pred_dir, "directory of prediction CSVs")
      ->required();
  evaluate->add_option("--gt", gt_dir, "directory of ground-truth CSVs")
      ->required();
  evaluate->add_option("--width", width, "image width in pixels")->required();
  evaluate->add_option("--height", height, "image height in pixels")
      ->required();
  evaluate->add_option("--focal", focal, "focal length for pose metrics "
                                         "(default: width)");
  evaluate->add_option("--cx", cx, "principal point x (default: width/2)");
  evaluate->add_option("--cy", cy, "principal point y (default: height/2; "
                                   "use 0 for synthetic trajectories)");
  evaluate->add_option("--report", report_path, "metrics report JSON path");
  evaluate->add_option("--histogram", histogram_path,
                       "cumulative error histogram CSV path");

  // smooth
  auto* smooth = app.add_subcommand(
      "smooth", "Exponential smoothing over a trajectory CSV");
  std::string smooth_in, smooth_out;
  double alpha = 0.5, smooth_width = 0;
  smooth->add_option("--input", smooth_in, "input trajectory CSV")->required();
  smooth->add_option("--alpha", alpha, "smoothing factor in (0,1]");
  smooth->add_option("--width", smooth_width,
                     "image width, used to re-derive line coefficients")
      ->required();
  smooth->add_option("--output", smooth_out, "output CSV")->required();

  // gradcheck
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Finite-difference checks of the autodiff primitives");
  std::string variant = "all";
  double tolerance = 1e-4;
  std::uint64_t gc_seed = 7;
  gradcheck->add_option(
      "--variant", variant,
      "primitives | standard | naive_residual | residual_dense | tcn | all");
  gradcheck->add_option("--tolerance", tolerance, "max relative error");
  gradcheck->add_option("--seed", gc_seed, "sampling seed");

  // synth
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic labelled dataset");
  std::string synth_cfg, synth_out;
  synth_cmd->add_option("--config", synth_cfg, "synth config JSON")->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand(
      "train", "Train a model on the synthetic benchmark");
  std::string train_cfg, train_out;
  std::uint64_t train_seed = 0;
  train_cmd->add_option("--config", train_cfg,
                        "JSON with model/train/synth sections")
      ->required();
  train_cmd->add_option("--out", train_out, "output directory")->required();
  auto* seed_opt =
      train_cmd->add_option("--seed", train_seed, "training seed override");

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "Run an ablation matrix with shared data and budgets");
  std::string matrix_path, ablate_out;
  ablate->add_option("--matrix", matrix_path, "ablation matrix JSON")
      ->required();
  ablate->add_option("--out", ablate_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (annotate->parsed())
      return cmd_annotate(kitti_root, camera, annotate_out, split_spec,
                          width_override, height_override);
    if (evaluate->parsed())
      return cmd_evaluate(pred_dir, gt_dir, width, height, focal,
                          cx < 0 ? width / 2 : cx, cy < 0 ? height / 2 : cy,
                          report_path, histogram_path);
    if (smooth->parsed())
      return cmd_smooth(smooth_in, alpha, smooth_width, smooth_out);
    if (gradcheck->parsed()) return cmd_gradcheck(variant, tolerance, gc_seed);
    if (synth_cmd->parsed()) return cmd_synth(synth_cfg, synth_out);
    if (train_cmd->parsed())
      return cmd_train(train_cfg, train_out, train_seed, !seed_opt->empty());
    if (ablate->parsed()) return cmd_ablate(matrix_path, ablate_out);
  } catch (const DivergedLoss& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
