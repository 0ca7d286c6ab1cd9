// miscal command line tool: seeded misalignment sweeps, fusion demos, and
// report re-scoring.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "miscal/errors.hpp"
#include "miscal/experiment.hpp"
#include "miscal/io.hpp"
#include "miscal/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  uint64_t seed = 0;
  std::string out;
  int snippets = 0;
  double noise_px = -1.0;
  int jobs = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* snippets_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    seed_opt = app->add_option("--seed", seed, "master seed (overrides config)");
    out_opt = app->add_option("--out", out, "output directory (overrides config)");
    snippets_opt = app->add_option("--snippets", snippets, "snippet count");
    noise_opt = app->add_option("--noise-px", noise_px, "pixel noise sigma");
    jobs_opt = app->add_option("--jobs", jobs, "worker threads");
  }

  miscal::ExperimentConfig resolve() const {
    miscal::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = miscal::load_config(config_path);
    }
    miscal::apply_env_overrides(cfg);
    if (seed_opt && seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt && out_opt->count() > 0) cfg.output_dir = out;
    if (snippets_opt && snippets_opt->count() > 0) cfg.snippets = snippets;
    if (noise_opt && noise_opt->count() > 0) cfg.scene.pixel_noise_sigma_px = noise_px;
    if (jobs_opt && jobs_opt->count() > 0) cfg.jobs = jobs;
    cfg.validate();
    return cfg;
  }
};

// Small scene and an aggressive noise ladder so the uncertainty filter has
// something to reject.
miscal::ExperimentConfig default_demo_config() {
  miscal::ExperimentConfig cfg;
  cfg.snippets = 1;
  cfg.scene.n_points = 12;
  cfg.perturbation.mode = miscal::PerturbationMode::kFixed;
  cfg.perturbation.fixed = {0.4, -0.3, 0.5};
  cfg.output_dir = "out";
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"misalignment estimation toolkit"};
  app.set_version_flag("--version", miscal::kMiscalVersion);
  app.require_subcommand(1);

  CLI::App* sweep = app.add_subcommand("sweep", "run a seeded snippet sweep and write reports");
  CommonFlags sweep_flags;
  sweep_flags.attach(sweep);

  CLI::App* demo = app.add_subcommand("fuse-demo", "trace one snippet through the fusion modes");
  CommonFlags demo_flags;
  demo_flags.attach(demo);
  bool dump_scene = false;
  demo->add_flag("--dump-scene", dump_scene,
                 "also write the demo scene and its depth raster as JSON");

  CLI::App* evaluate = app.add_subcommand("evaluate", "re-score reports from results.json");
  std::string eval_dir;
  evaluate->add_option("--out", eval_dir, "directory with results.json + summary.json")
      ->required();

  CLI::App* schema = app.add_subcommand("schema", "print the CSV/JSON schemas");
  bool schema_config = false;
  schema->add_flag("--config", schema_config, "print the default config as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      const miscal::ExperimentConfig cfg = sweep_flags.resolve();
      const std::vector<miscal::SnippetResult> results = miscal::run_sweep(cfg);
      miscal::write_reports(cfg, results);
      std::cout << "wrote " << results.size() << " snippets to " << cfg.output_dir << "\n";
    } else if (demo->parsed()) {
      miscal::ExperimentConfig cfg = default_demo_config();
      if (!demo_flags.config_path.empty()) {
        cfg = miscal::load_config(demo_flags.config_path);
      }
      miscal::apply_env_overrides(cfg);
      if (demo_flags.seed_opt->count() > 0) cfg.seed = demo_flags.seed;
      if (demo_flags.out_opt->count() > 0) cfg.output_dir = demo_flags.out;
      if (demo_flags.noise_opt->count() > 0) {
        cfg.scene.pixel_noise_sigma_px = demo_flags.noise_px;
      }
      cfg.validate();
      std::cout << "wrote " << miscal::demo_fusion(cfg) << "\n";
      if (dump_scene) {
        miscal::Rng scene_rng(miscal::detail::scene_seed(cfg, 0, 0));
        const miscal::SyntheticScene scene = miscal::generate_scene(cfg.scene, scene_rng);
        const std::string scene_path = cfg.output_dir + "/scene.json";
        miscal::write_text_file(scene_path, miscal::scene_to_json_text(scene));
        const miscal::DepthImage raster = miscal::render_depth_image(
            scene.points, miscal::RigidTransform{}, miscal::CameraIntrinsics::reference());
        const std::string depth_path = cfg.output_dir + "/depth.json";
        miscal::write_text_file(depth_path, miscal::depth_image_to_json_text(raster));
        std::cout << "wrote " << scene_path << " and " << depth_path << "\n";
      }
    } else if (evaluate->parsed()) {
      miscal::evaluate_existing(eval_dir);
      std::cout << "re-scored reports in " << eval_dir << "\n";
    } else if (schema->parsed()) {
      if (schema_config) {
        std::cout << miscal::config_to_json_text(miscal::ExperimentConfig{});
      } else {
        std::cout << miscal::schema_text();
      }
    }
  } catch (const miscal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const miscal::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const miscal::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
