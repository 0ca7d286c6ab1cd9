#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "miscal/errors.hpp"
#include "miscal/experiment.hpp"
#include "miscal/version.hpp"

namespace miscal {

namespace fs = std::filesystem;
using json_io::json;

namespace json_io {

json euler_to_json(const EulerMisalignment& e) {
  return json::array({e.roll_deg, e.pitch_deg, e.yaw_deg});
}

EulerMisalignment euler_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json config_to_json(const ExperimentConfig& c) {
  const char* mode = c.perturbation.mode == PerturbationMode::kGaussian ? "gaussian"
                     : c.perturbation.mode == PerturbationMode::kFixed  ? "fixed"
                                                                        : "grid";
  json buckets = json::array();
  for (const RangeBucket& b : c.scene.buckets) {
    buckets.push_back(json::array({b.min_m, b.max_m}));
  }
  return json{
      {"seed", c.seed},
      {"snippets", c.snippets},
      {"frames_per_snippet", c.frames_per_snippet},
      {"frame_dt_s", c.frame_dt_s},
      {"jobs", c.jobs},
      {"output", c.output_dir},
      {"scene",
       {{"n_points", c.scene.n_points},
        {"range_min_m", c.scene.range_min_m},
        {"range_max_m", c.scene.range_max_m},
        {"n_boxes_per_bucket", c.scene.n_boxes_per_bucket},
        {"buckets", buckets},
        {"pixel_noise_sigma_px", c.scene.pixel_noise_sigma_px},
        {"image_fraction", c.scene.image_fraction}}},
      {"perturbation",
       {{"mode", mode},
        {"sigma_deg", c.perturbation.sigma_deg},
        {"clamp_deg", c.perturbation.clamp_deg},
        {"grid_min_deg", c.perturbation.grid_min_deg},
        {"grid_max_deg", c.perturbation.grid_max_deg},
        {"grid_step_deg", c.perturbation.grid_step_deg},
        {"fixed_deg", euler_to_json(c.perturbation.fixed)},
        {"seed", c.perturbation.seed}}},
      {"estimator",
       {{"max_gn_iterations", c.estimator.max_gn_iterations},
        {"convergence_tol_deg", c.estimator.convergence_tol_deg},
        {"min_correspondences", c.estimator.min_correspondences},
        {"condition_warn_threshold", c.estimator.condition_warn_threshold},
        {"condition_fail_threshold", c.estimator.condition_fail_threshold}}},
      {"fusion",
       {{"window_s", c.fusion.window_s},
        {"sigma_max_deg", c.fusion.sigma_max_deg},
        {"detect_threshold_deg", c.fusion.detect_threshold_deg},
        {"weight_rule", c.fusion.weight_rule == WeightRule::kInverseSigma
                            ? "inverse-sigma"
                            : "inverse-variance"}}},
      {"metrics",
       {{"iou_min", c.metrics.iou_min},
        {"robustness_factor", c.metrics.robustness_factor},
        {"score_decay_m", c.metrics.score_decay_m}}}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.seed = j.value("seed", c.seed);
  c.snippets = j.value("snippets", c.snippets);
  c.frames_per_snippet = j.value("frames_per_snippet", c.frames_per_snippet);
  c.frame_dt_s = j.value("frame_dt_s", c.frame_dt_s);
  c.jobs = j.value("jobs", c.jobs);
  c.output_dir = j.value("output", c.output_dir);
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    c.scene.n_points = s.value("n_points", c.scene.n_points);
    c.scene.range_min_m = s.value("range_min_m", c.scene.range_min_m);
    c.scene.range_max_m = s.value("range_max_m", c.scene.range_max_m);
    c.scene.n_boxes_per_bucket = s.value("n_boxes_per_bucket", c.scene.n_boxes_per_bucket);
    c.scene.pixel_noise_sigma_px =
        s.value("pixel_noise_sigma_px", c.scene.pixel_noise_sigma_px);
    c.scene.image_fraction = s.value("image_fraction", c.scene.image_fraction);
    if (s.contains("buckets")) {
      c.scene.buckets.clear();
      for (const json& b : s.at("buckets")) {
        c.scene.buckets.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
      }
    }
  }
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    const std::string mode = p.value("mode", std::string("grid"));
    if (mode == "gaussian") {
      c.perturbation.mode = PerturbationMode::kGaussian;
    } else if (mode == "fixed") {
      c.perturbation.mode = PerturbationMode::kFixed;
    } else if (mode == "grid") {
      c.perturbation.mode = PerturbationMode::kGrid;
    } else {
      throw ConfigError("config: unknown perturbation mode '" + mode + "'");
    }
    c.perturbation.sigma_deg = p.value("sigma_deg", c.perturbation.sigma_deg);
    c.perturbation.clamp_deg = p.value("clamp_deg", c.perturbation.clamp_deg);
    c.perturbation.grid_min_deg = p.value("grid_min_deg", c.perturbation.grid_min_deg);
    c.perturbation.grid_max_deg = p.value("grid_max_deg", c.perturbation.grid_max_deg);
    c.perturbation.grid_step_deg = p.value("grid_step_deg", c.perturbation.grid_step_deg);
    if (p.contains("fixed_deg")) c.perturbation.fixed = euler_from_json(p.at("fixed_deg"));
    c.perturbation.seed = p.value("seed", c.perturbation.seed);
  }
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    c.estimator.max_gn_iterations = e.value("max_gn_iterations", c.estimator.max_gn_iterations);
    c.estimator.convergence_tol_deg =
        e.value("convergence_tol_deg", c.estimator.convergence_tol_deg);
    c.estimator.min_correspondences =
        e.value("min_correspondences", c.estimator.min_correspondences);
    c.estimator.condition_warn_threshold =
        e.value("condition_warn_threshold", c.estimator.condition_warn_threshold);
    c.estimator.condition_fail_threshold =
        e.value("condition_fail_threshold", c.estimator.condition_fail_threshold);
  }
  if (j.contains("fusion")) {
    const json& f = j.at("fusion");
    c.fusion.window_s = f.value("window_s", c.fusion.window_s);
    c.fusion.sigma_max_deg = f.value("sigma_max_deg", c.fusion.sigma_max_deg);
    c.fusion.detect_threshold_deg =
        f.value("detect_threshold_deg", c.fusion.detect_threshold_deg);
    const std::string rule = f.value("weight_rule", std::string("inverse-variance"));
    if (rule == "inverse-variance") {
      c.fusion.weight_rule = WeightRule::kInverseVariance;
    } else if (rule == "inverse-sigma") {
      c.fusion.weight_rule = WeightRule::kInverseSigma;
    } else {
      throw ConfigError("config: unknown weight rule '" + rule + "'");
    }
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    c.metrics.iou_min = m.value("iou_min", c.metrics.iou_min);
    c.metrics.robustness_factor = m.value("robustness_factor", c.metrics.robustness_factor);
    c.metrics.score_decay_m = m.value("score_decay_m", c.metrics.score_decay_m);
  }
  return c;
}

json snippet_to_json(const SnippetResult& r) {
  json frames = json::array();
  for (const MisalignmentEstimate& f : r.frames) {
    frames.push_back({{"t", f.timestamp_s},
                      {"dr", euler_to_json(f.dr)},
                      {"sigma", {f.sigma_deg(0), f.sigma_deg(1), f.sigma_deg(2)}},
                      {"n_used", f.n_used},
                      {"converged", f.converged}});
  }
  return json{
      {"id", r.id},
      {"injected", euler_to_json(r.injected)},
      {"scene_seed", r.scene_seed},
      {"frames", frames},
      {"mean_estimate", euler_to_json(r.mean_estimate)},
      {"weighted",
       {{"dr", euler_to_json(r.weighted.dr)},
        {"sigma", {r.weighted.sigma_deg(0), r.weighted.sigma_deg(1), r.weighted.sigma_deg(2)}},
        {"n_fused", r.weighted.n_fused},
        {"n_filtered", r.weighted.n_filtered}}},
      {"weighted_fallback", r.weighted_fallback},
      {"f1",
       {{"baseline", r.f1_baseline},
        {"uncorrected", r.f1_uncorrected},
        {"corrected", r.f1_corrected}}},
      {"elapsed_ms", r.elapsed_ms}};
}

SnippetResult snippet_from_json(const json& j) {
  SnippetResult r;
  r.id = j.at("id").get<uint64_t>();
  r.injected = euler_from_json(j.at("injected"));
  r.scene_seed = j.at("scene_seed").get<uint64_t>();
  for (const json& fj : j.at("frames")) {
    MisalignmentEstimate e;
    e.timestamp_s = fj.at("t").get<double>();
    e.dr = euler_from_json(fj.at("dr"));
    e.sigma_deg = Eigen::Vector3d(fj.at("sigma").at(0).get<double>(),
                                  fj.at("sigma").at(1).get<double>(),
                                  fj.at("sigma").at(2).get<double>());
    e.n_used = fj.at("n_used").get<int>();
    e.converged = fj.at("converged").get<bool>();
    r.frames.push_back(e);
  }
  r.mean_estimate = euler_from_json(j.at("mean_estimate"));
  const json& w = j.at("weighted");
  r.weighted.dr = euler_from_json(w.at("dr"));
  r.weighted.sigma_deg =
      Eigen::Vector3d(w.at("sigma").at(0).get<double>(), w.at("sigma").at(1).get<double>(),
                      w.at("sigma").at(2).get<double>());
  r.weighted.n_fused = w.at("n_fused").get<int>();
  r.weighted.n_filtered = w.at("n_filtered").get<int>();
  r.weighted_fallback = j.at("weighted_fallback").get<bool>();
  r.f1_baseline = j.at("f1").at("baseline").get<std::vector<double>>();
  r.f1_uncorrected = j.at("f1").at("uncorrected").get<std::vector<double>>();
  r.f1_corrected = j.at("f1").at("corrected").get<std::vector<double>>();
  r.elapsed_ms = j.value("elapsed_ms", 0.0);
  return r;
}

}  // namespace json_io

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) {
  return v.has_value() ? fmt(*v) : "nan";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out << content;
  if (!out.good()) {
    throw IoError("write failed: " + path.string());
  }
}

const char* kAxisNames[3] = {"roll", "pitch", "yaw"};
const char* kVariantNames[3] = {"baseline", "uncorrected", "corrected"};
constexpr EvalVariant kVariants[3] = {EvalVariant::kBaseline, EvalVariant::kUncorrected,
                                      EvalVariant::kCorrected};

struct ModeStats {
  MdaCounts counts;
  Eigen::Vector3d err_sum = Eigen::Vector3d::Zero();
  int64_t n = 0;

  void add(const EulerMisalignment& estimate, const EulerMisalignment& injected,
           double threshold_deg) {
    counts = mda_accumulate(counts, classify_misalignment(estimate, threshold_deg),
                            injected, threshold_deg);
    err_sum += (injected.degrees() - estimate.degrees()).cwiseAbs();
    ++n;
  }

  std::string csv_row(const std::string& mode) const {
    const PrecisionRecall pr = precision_recall(counts);
    const Eigen::Vector3d mean = n > 0 ? Eigen::Vector3d(err_sum / static_cast<double>(n))
                                       : Eigen::Vector3d::Zero();
    std::ostringstream row;
    row << mode << ',' << counts.tp << ',' << counts.tn << ',' << counts.fp << ','
        << counts.fn << ',' << fmt(pr.precision) << ',' << fmt(pr.recall) << ','
        << fmt(mean.x()) << ',' << fmt(mean.y()) << ',' << fmt(mean.z()) << '\n';
    return row.str();
  }
};

std::string mda_csv(const ExperimentConfig& cfg, const std::vector<SnippetResult>& results) {
  const double thr = cfg.fusion.detect_threshold_deg;
  ModeStats per_frame, unweighted, weighted;
  for (const SnippetResult& r : results) {
    for (const MisalignmentEstimate& f : r.frames) {
      per_frame.add(f.dr, r.injected, thr);
    }
    unweighted.add(r.mean_estimate, r.injected, thr);
    weighted.add(r.weighted.dr, r.injected, thr);
  }
  std::string out =
      "mode,tp,tn,fp,fn,precision,recall,mean_err_roll,mean_err_pitch,mean_err_yaw\n";
  out += per_frame.csv_row("per_frame");
  out += unweighted.csv_row("snippet_unweighted");
  out += weighted.csv_row("snippet_weighted");
  return out;
}

std::string error_sweep_csv(const std::vector<SnippetResult>& results) {
  std::vector<SweepSample> samples;
  samples.reserve(results.size());
  for (const SnippetResult& r : results) {
    samples.push_back({r.injected, r.weighted.dr});
  }
  std::string out =
      "injected_axis,injected_deg,mean_abs_err_roll,std_roll,mean_abs_err_pitch,"
      "std_pitch,mean_abs_err_yaw,std_yaw,n\n";
  for (const ErrorSweepRow& row : error_sweep(samples)) {
    std::ostringstream line;
    line << kAxisNames[row.axis] << ',' << fmt(row.injected_deg);
    for (int axis = 0; axis < 3; ++axis) {
      line << ',' << fmt(row.mean_abs_err[axis]) << ',' << fmt(row.err_std[axis]);
    }
    line << ',' << row.n << '\n';
    out += line.str();
  }
  return out;
}

std::string bev_f1_csv(const ExperimentConfig& cfg,
                       const std::vector<SnippetResult>& results) {
  const size_t n_buckets = cfg.scene.buckets.size();
  std::vector<std::array<std::vector<MatchedDetection>, 3>> pooled(n_buckets);
  std::vector<int64_t> gts_total(n_buckets, 0);

  for (const SnippetResult& r : results) {
    Rng scene_rng(r.scene_seed);
    const SyntheticScene scene = generate_scene(cfg.scene, scene_rng);
    for (size_t b = 0; b < n_buckets; ++b) {
      std::vector<BevBox> gts;
      std::vector<size_t> indices;
      for (size_t i = 0; i < scene.boxes.size(); ++i) {
        if (scene.boxes[i].bucket_index == static_cast<int>(b)) {
          gts.push_back(scene.boxes[i].box);
          indices.push_back(i);
        }
      }
      gts_total[b] += static_cast<int64_t>(gts.size());
      for (int v = 0; v < 3; ++v) {
        const EulerMisalignment residual =
            variant_residual(r.injected, r.weighted.dr, kVariants[v]);
        const std::vector<Detection> all_dets = simulate_detections(
            scene, residual, variant_displacement_factor(kVariants[v], cfg.metrics),
            cfg.metrics);
        std::vector<Detection> dets;
        dets.reserve(indices.size());
        for (size_t i : indices) dets.push_back(all_dets[i]);
        const std::vector<MatchedDetection> matches =
            greedy_match(dets, gts, cfg.metrics.iou_min);
        pooled[b][v].insert(pooled[b][v].end(), matches.begin(), matches.end());
      }
    }
  }

  std::string out = "bucket_min_m,bucket_max_m,variant,max_f1\n";
  for (size_t b = 0; b < n_buckets; ++b) {
    for (int v = 0; v < 3; ++v) {
      std::ostringstream line;
      line << fmt(cfg.scene.buckets[b].min_m) << ',' << fmt(cfg.scene.buckets[b].max_m)
           << ',' << kVariantNames[v] << ','
           << fmt(max_f1_from_matches(pooled[b][v], gts_total[b])) << '\n';
      out += line.str();
    }
  }
  return out;
}

}  // namespace

void write_reports(const ExperimentConfig& cfg, const std::vector<SnippetResult>& results) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + cfg.output_dir + ": " + ec.message());
  }
  const fs::path dir(cfg.output_dir);

  write_file(dir / "mda.csv", mda_csv(cfg, results));
  write_file(dir / "error_sweep.csv", error_sweep_csv(results));
  write_file(dir / "bev_f1.csv", bev_f1_csv(cfg, results));

  json snippets = json::array();
  for (const SnippetResult& r : results) {
    snippets.push_back(json_io::snippet_to_json(r));
  }
  const json results_json{{"format_version", 1}, {"snippets", snippets}};
  write_file(dir / "results.json", results_json.dump(1) + "\n");

  const json summary{
      {"config", json_io::config_to_json(cfg)},
      {"seed", cfg.seed},
      {"snippets_run", results.size()},
      {"versions", {{"miscal", kMiscalVersion}, {"results_format", 1}}},
      {"files", {"mda.csv", "error_sweep.csv", "bev_f1.csv", "results.json", "summary.json"}}};
  write_file(dir / "summary.json", summary.dump(1) + "\n");
}

void evaluate_existing(const std::string& dir) {
  const fs::path base(dir);
  auto read_json = [](const fs::path& p) {
    std::ifstream in(p);
    if (!in) {
      throw IoError("cannot open: " + p.string());
    }
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw IoError("cannot parse " + p.string() + ": " + e.what());
    }
  };
  const json summary = read_json(base / "summary.json");
  ExperimentConfig cfg = json_io::config_from_json(summary.at("config"));
  cfg.output_dir = dir;

  const json results_json = read_json(base / "results.json");
  std::vector<SnippetResult> results;
  for (const json& sj : results_json.at("snippets")) {
    results.push_back(json_io::snippet_from_json(sj));
  }
  write_reports(cfg, results);
}

std::string demo_fusion(const ExperimentConfig& cfg) {
  cfg.validate();
  const CameraIntrinsics k = CameraIntrinsics::reference();
  const EulerMisalignment fault = detail::fault_for_snippet(cfg, 0);
  Rng scene_rng(detail::scene_seed(cfg, 0, 0));
  const SyntheticScene scene = generate_scene(cfg.scene, scene_rng);
  const std::vector<double> ladder = demo_noise_ladder();

  std::vector<MisalignmentEstimate> frames;
  json trace_frames = json::array();
  Rng noise_base(detail::noise_seed(cfg, 0));
  for (int f = 0; f < cfg.frames_per_snippet; ++f) {
    const double noise_px =
        cfg.scene.pixel_noise_sigma_px * ladder[static_cast<size_t>(f) % ladder.size()];
    Rng frame_rng = noise_base.substream(static_cast<uint64_t>(f));
    const std::vector<Correspondence> cs =
        make_correspondences(scene, k, fault, noise_px, frame_rng);
    const MisalignmentEstimate est = estimate_frame(cs, cfg.estimator, f * cfg.frame_dt_s);
    frames.push_back(est);

    const EulerMisalignment running_mean = [&] {
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      for (const MisalignmentEstimate& e : frames) s += e.dr.degrees();
      s /= static_cast<double>(frames.size());
      return EulerMisalignment{s.x(), s.y(), s.z()};
    }();

    json running_weighted;
    try {
      const FusedEstimate w =
          fuse_filtered(frames, cfg.fusion.sigma_max_deg, cfg.fusion.weight_rule);
      running_weighted = json_io::euler_to_json(w.dr);
    } catch (const NothingToFuse&) {
      running_weighted = nullptr;
    }

    trace_frames.push_back(
        {{"t", est.timestamp_s},
         {"noise_px", noise_px},
         {"dr", json_io::euler_to_json(est.dr)},
         {"sigma", {est.sigma_deg(0), est.sigma_deg(1), est.sigma_deg(2)}},
         {"n_used", est.n_used},
         {"kept_by_filter", est.max_sigma_deg() <= cfg.fusion.sigma_max_deg},
         {"running",
          {{"per_frame", json_io::euler_to_json(est.dr)},
           {"snippet_unweighted", json_io::euler_to_json(running_mean)},
           {"snippet_weighted", running_weighted}}}});
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const MisalignmentEstimate& e : frames) mean += e.dr.degrees();
  mean /= static_cast<double>(frames.size());
  json final_weighted;
  bool weighted_fallback = false;
  try {
    const FusedEstimate w =
        fuse_filtered(frames, cfg.fusion.sigma_max_deg, cfg.fusion.weight_rule);
    final_weighted = {{"dr", json_io::euler_to_json(w.dr)},
                      {"sigma", {w.sigma_deg(0), w.sigma_deg(1), w.sigma_deg(2)}},
                      {"n_fused", w.n_fused},
                      {"n_filtered", w.n_filtered}};
  } catch (const NothingToFuse&) {
    final_weighted = nullptr;
    weighted_fallback = true;
  }

  const json trace{
      {"injected", json_io::euler_to_json(fault)},
      {"noise_ladder", ladder},
      {"frames", trace_frames},
      {"final",
       {{"per_frame_last", json_io::euler_to_json(frames.back().dr)},
        {"snippet_unweighted", json_io::euler_to_json({mean.x(), mean.y(), mean.z()})},
        {"snippet_weighted", final_weighted},
        {"weighted_fallback", weighted_fallback}}}};

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + cfg.output_dir + ": " + ec.message());
  }
  const fs::path path = fs::path(cfg.output_dir) / "fusion_trace.json";
  write_file(path, trace.dump(1) + "\n");
  return path.string();
}

std::string schema_text() {
  return R"(miscal report schemas

mda.csv
  columns: mode,tp,tn,fp,fn,precision,recall,mean_err_roll,mean_err_pitch,mean_err_yaw
  rows:    per_frame, snippet_unweighted, snippet_weighted
  precision/recall print "nan" when their denominator is zero.
  mean_err_* are mean absolute errors in degrees against the injected fault.

error_sweep.csv
  columns: injected_axis,injected_deg,mean_abs_err_roll,std_roll,mean_abs_err_pitch,std_pitch,mean_abs_err_yaw,std_yaw,n
  one row per (axis, injected grid value); errors are absolute degrees over the
  snippets whose injected fault has that value on that axis; std is the
  population standard deviation.

bev_f1.csv
  columns: bucket_min_m,bucket_max_m,variant,max_f1
  variant: baseline | uncorrected | corrected
  max_f1 is pooled over all snippets at iou_min from the config.

results.json
  { "format_version": 1, "snippets": [ { "id", "injected" [roll,pitch,yaw deg],
    "scene_seed", "frames": [ { "t", "dr", "sigma", "n_used", "converged" } ],
    "mean_estimate", "weighted": { "dr", "sigma", "n_fused", "n_filtered" },
    "weighted_fallback", "f1": { "baseline", "uncorrected", "corrected" },
    "elapsed_ms" } ] }

summary.json
  { "config": <config echo>, "seed", "snippets_run", "versions", "files" }

fusion_trace.json (fuse-demo)
  { "injected", "noise_ladder", "frames": [ { "t", "noise_px", "dr", "sigma",
    "n_used", "kept_by_filter", "running": { "per_frame", "snippet_unweighted",
    "snippet_weighted" } } ], "final": { ... } }

config file (JSON; every key optional, defaults shown by `miscal schema --config`)
  top level: seed, snippets, frames_per_snippet, frame_dt_s, jobs, output
  scene: n_points, range_min_m, range_max_m, n_boxes_per_bucket,
         buckets [[min,max]...], pixel_noise_sigma_px, image_fraction
  perturbation: mode (grid|gaussian|fixed), sigma_deg, clamp_deg,
                grid_min_deg, grid_max_deg, grid_step_deg, fixed_deg, seed
  estimator: max_gn_iterations, convergence_tol_deg, min_correspondences,
             condition_warn_threshold, condition_fail_threshold
  fusion: window_s, sigma_max_deg, detect_threshold_deg,
          weight_rule (inverse-variance|inverse-sigma)
  metrics: iou_min, robustness_factor, score_decay_m

environment overrides: MISCAL_SEED, MISCAL_OUT
)";
}

}  // namespace miscal
