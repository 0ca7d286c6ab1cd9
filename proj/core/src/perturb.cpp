#include "miscal/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "miscal/errors.hpp"

namespace miscal {

void PerturbationConfig::validate() const {
  if (clamp_deg <= 0.0) {
    throw ConfigError("perturbation: clamp must be > 0");
  }
  if (mode == PerturbationMode::kGaussian && sigma_deg <= 0.0) {
    throw ConfigError("perturbation: gaussian mode needs sigma > 0");
  }
  if (mode == PerturbationMode::kGrid) {
    if (grid_step_deg <= 0.0) {
      throw ConfigError("perturbation: grid step must be > 0");
    }
    const double span = grid_max_deg - grid_min_deg;
    if (span < 0.0) {
      throw ConfigError("perturbation: grid max < grid min");
    }
    const double cells = span / grid_step_deg;
    if (std::abs(cells - std::round(cells)) > 1e-9) {
      throw ConfigError("perturbation: grid span is not a multiple of step");
    }
  }
  if (mode == PerturbationMode::kFixed && fixed.max_abs_deg() > clamp_deg) {
    throw ConfigError("perturbation: fixed fault exceeds clamp");
  }
}

EulerMisalignment sample_training_perturbation(const PerturbationConfig& cfg, Rng& rng) {
  const double c = cfg.clamp_deg;
  auto draw = [&] {
    return std::clamp(rng.gaussian(0.0, cfg.sigma_deg), -c, c);
  };
  const double roll = draw();
  const double pitch = draw();
  const double yaw = draw();
  return {roll, pitch, yaw};
}

std::vector<double> grid_values(const PerturbationConfig& cfg) {
  const int n = static_cast<int>(
      std::round((cfg.grid_max_deg - cfg.grid_min_deg) / cfg.grid_step_deg)) + 1;
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    values[i] = cfg.grid_min_deg + i * cfg.grid_step_deg;
  }
  return values;
}

GridFaultSampler::GridFaultSampler(const PerturbationConfig& cfg)
    : values_(grid_values(cfg)), seed_(cfg.seed), clamp_deg_(cfg.clamp_deg) {}

InjectedFault GridFaultSampler::fault_for_snippet(uint64_t snippet_id) const {
  Rng rng = Rng(seed_).substream(snippet_id);
  const size_t n = values_.size();
  const double roll = values_[rng.uniform_index(n)];
  const double pitch = values_[rng.uniform_index(n)];
  const double yaw = values_[rng.uniform_index(n)];
  return {snippet_id, {roll, pitch, yaw}};
}

std::vector<Point3> perturb_points(const std::vector<Point3>& points_cam,
                                   const EulerMisalignment& dr) {
  const RotationMatrix r = rotation_from_misalignment(dr);
  std::vector<Point3> out;
  out.reserve(points_cam.size());
  for (const Point3& p : points_cam) {
    out.push_back(r * p);
  }
  return out;
}

RigidTransform perturb_transform(const RigidTransform& t, const EulerMisalignment& dr) {
  return t.compose({rotation_from_misalignment(dr), Eigen::Vector3d::Zero()});
}

}  // namespace miscal
