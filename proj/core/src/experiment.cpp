#include "miscal/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "miscal/errors.hpp"

namespace miscal {

using json_io::json;

void ExperimentConfig::validate() const {
  if (snippets <= 0) throw ConfigError("config: snippets must be > 0");
  if (frames_per_snippet <= 0) throw ConfigError("config: frames_per_snippet must be > 0");
  if (frame_dt_s <= 0.0) throw ConfigError("config: frame_dt_s must be > 0");
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (output_dir.empty()) throw ConfigError("config: output directory is empty");
  if (fusion.window_s <= 0.0) throw ConfigError("config: fusion window must be > 0");
  if (fusion.sigma_max_deg <= 0.0) throw ConfigError("config: sigma_max must be > 0");
  if (fusion.detect_threshold_deg <= 0.0) {
    throw ConfigError("config: detection threshold must be > 0");
  }
  if ((frames_per_snippet - 1) * frame_dt_s > fusion.window_s + 1e-9) {
    throw ConfigError("config: snippet frames do not fit the fusion window");
  }
  scene.validate();
  perturbation.validate();
  estimator.validate();
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return json_io::config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad field: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  return json_io::config_to_json(cfg).dump(2) + "\n";
}

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* seed = std::getenv("MISCAL_SEED")) {
    try {
      cfg.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw ConfigError(std::string("MISCAL_SEED is not a valid integer: ") + seed);
    }
  }
  if (const char* out = std::getenv("MISCAL_OUT")) {
    cfg.output_dir = out;
  }
}

namespace detail {

uint64_t fault_seed(const ExperimentConfig& cfg) {
  return cfg.perturbation.seed != 0 ? cfg.perturbation.seed
                                    : derive_seed(cfg.seed, 0xFA01);
}

uint64_t scene_seed(const ExperimentConfig& cfg, uint64_t snippet_id, int attempt) {
  return derive_seed(cfg.seed, 0x5CE0 + static_cast<uint64_t>(attempt), snippet_id);
}

uint64_t noise_seed(const ExperimentConfig& cfg, uint64_t snippet_id) {
  return derive_seed(cfg.seed, 0x0150, snippet_id);
}

EulerMisalignment fault_for_snippet(const ExperimentConfig& cfg, uint64_t snippet_id) {
  switch (cfg.perturbation.mode) {
    case PerturbationMode::kFixed:
      return cfg.perturbation.fixed;
    case PerturbationMode::kGaussian: {
      Rng rng = Rng(fault_seed(cfg)).substream(snippet_id);
      return sample_training_perturbation(cfg.perturbation, rng);
    }
    case PerturbationMode::kGrid:
    default: {
      PerturbationConfig pc = cfg.perturbation;
      pc.seed = fault_seed(cfg);
      return GridFaultSampler(pc).fault_for_snippet(snippet_id).dr;
    }
  }
}

}  // namespace detail

namespace {

EulerMisalignment mean_of_frames(const std::vector<MisalignmentEstimate>& frames) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const MisalignmentEstimate& f : frames) sum += f.dr.degrees();
  sum /= static_cast<double>(frames.size());
  return {sum.x(), sum.y(), sum.z()};
}

}  // namespace

SnippetResult run_snippet(const ExperimentConfig& cfg, uint64_t snippet_id) {
  const auto t0 = std::chrono::steady_clock::now();
  const CameraIntrinsics k = CameraIntrinsics::reference();
  constexpr int kRetryBudget = 3;

  SnippetResult res;
  res.id = snippet_id;
  res.injected = detail::fault_for_snippet(cfg, snippet_id);

  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    res.scene_seed = detail::scene_seed(cfg, snippet_id, attempt);
    Rng scene_rng(res.scene_seed);
    const SyntheticScene scene = generate_scene(cfg.scene, scene_rng);
    try {
      res.frames.clear();
      Rng noise_base(detail::noise_seed(cfg, snippet_id));
      for (int f = 0; f < cfg.frames_per_snippet; ++f) {
        Rng frame_rng = noise_base.substream(static_cast<uint64_t>(f));
        const std::vector<Correspondence> cs = make_correspondences(
            scene, k, res.injected, cfg.scene.pixel_noise_sigma_px, frame_rng);
        res.frames.push_back(estimate_frame(cs, cfg.estimator, f * cfg.frame_dt_s));
      }

      res.mean_estimate = mean_of_frames(res.frames);
      try {
        res.weighted =
            fuse_filtered(res.frames, cfg.fusion.sigma_max_deg, cfg.fusion.weight_rule);
      } catch (const NothingToFuse&) {
        res.weighted = fuse(res.frames, cfg.fusion.weight_rule);
        res.weighted_fallback = true;
      }

      res.f1_baseline = bucketed_detection_eval(scene, res.injected, res.weighted.dr,
                                                EvalVariant::kBaseline, cfg.metrics);
      res.f1_uncorrected = bucketed_detection_eval(scene, res.injected, res.weighted.dr,
                                                   EvalVariant::kUncorrected, cfg.metrics);
      res.f1_corrected = bucketed_detection_eval(scene, res.injected, res.weighted.dr,
                                                 EvalVariant::kCorrected, cfg.metrics);
      break;
    } catch (const NumericalError& e) {
      if (attempt + 1 == kRetryBudget) {
        throw NumericalError("snippet " + std::to_string(snippet_id) +
                             " failed beyond retry budget: " + e.what());
      }
    }
  }

  res.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return res;
}

std::vector<SnippetResult> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SnippetResult> results(static_cast<size_t>(cfg.snippets));
  std::atomic<uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const uint64_t i = next.fetch_add(1);
      if (i >= static_cast<uint64_t>(cfg.snippets)) return;
      try {
        results[i] = run_snippet(cfg, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, std::min(cfg.jobs, cfg.snippets));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

std::vector<double> demo_noise_ladder() { return {1.0, 1.0, 1.0, 16.0}; }

}  // namespace miscal
