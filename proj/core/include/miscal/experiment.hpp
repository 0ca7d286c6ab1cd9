// End-to-end experiment runner: seeded snippet sweeps, the three fusion
// evaluation modes, self-correction scoring, and report emission.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miscal/estimator.hpp"
#include "miscal/fusion.hpp"
#include "miscal/metrics.hpp"
#include "miscal/perturb.hpp"
#include "miscal/scene.hpp"

namespace miscal {

struct FusionConfig {
  double window_s = 5.0;
  double sigma_max_deg = 0.3;
  double detect_threshold_deg = 0.1;
  WeightRule weight_rule = WeightRule::kInverseVariance;
};

struct ExperimentConfig {
  uint64_t seed = 1;
  int snippets = 1000;
  int frames_per_snippet = 10;  // 2 Hz over the 5 s window
  double frame_dt_s = 0.5;
  int jobs = 1;
  std::string output_dir = "out";
  SceneConfig scene;
  PerturbationConfig perturbation;
  EstimatorConfig estimator;
  FusionConfig fusion;
  DetectionSimConfig metrics;

  void validate() const;
};

/// Parse a config file (JSON). Missing keys keep their defaults.
/// Throws ConfigError / IoError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Apply MISCAL_SEED / MISCAL_OUT environment overrides.
void apply_env_overrides(ExperimentConfig& cfg);

/// Everything recorded for one snippet.
struct SnippetResult {
  uint64_t id = 0;
  EulerMisalignment injected;
  uint64_t scene_seed = 0;
  std::vector<MisalignmentEstimate> frames;
  EulerMisalignment mean_estimate;  // plain per-axis mean over frames
  FusedEstimate weighted;           // filtered, uncertainty-weighted
  bool weighted_fallback = false;   // filter emptied the window; mean used
  std::vector<double> f1_baseline;  // per bucket
  std::vector<double> f1_uncorrected;
  std::vector<double> f1_corrected;
  double elapsed_ms = 0.0;
};

/// Deterministic sweep over cfg.snippets snippets; parallel over cfg.jobs
/// workers with per-snippet substreams (results do not depend on jobs).
std::vector<SnippetResult> run_sweep(const ExperimentConfig& cfg);

/// Run one snippet by id (used by the sweep workers and tests).
SnippetResult run_snippet(const ExperimentConfig& cfg, uint64_t snippet_id);

/// Write mda.csv, error_sweep.csv, bev_f1.csv, summary.json, results.json
/// into cfg.output_dir. Throws IoError with path context.
void write_reports(const ExperimentConfig& cfg, const std::vector<SnippetResult>& results);

/// Re-derive the CSV reports from a previously written results.json.
void evaluate_existing(const std::string& dir);

/// Single-snippet fusion trace (per-frame estimates, filter decisions, and
/// running fused values under per-frame / unweighted / weighted modes);
/// writes fusion_trace.json into cfg.output_dir and returns its path.
std::string demo_fusion(const ExperimentConfig& cfg);

/// Per-frame noise multipliers used by demo_fusion; one noisy frame per
/// cycle exercises the uncertainty filter.
std::vector<double> demo_noise_ladder();

/// Human-readable description of the CSV columns and JSON files.
std::string schema_text();

/// Internal helpers shared by the runner, the report writer and tests.
namespace detail {
uint64_t fault_seed(const ExperimentConfig& cfg);
uint64_t scene_seed(const ExperimentConfig& cfg, uint64_t snippet_id, int attempt);
uint64_t noise_seed(const ExperimentConfig& cfg, uint64_t snippet_id);
EulerMisalignment fault_for_snippet(const ExperimentConfig& cfg, uint64_t snippet_id);
}  // namespace detail

}  // namespace miscal
