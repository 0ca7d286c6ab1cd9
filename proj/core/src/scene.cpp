#include "miscal/scene.hpp"

#include <cmath>

#include "miscal/errors.hpp"

namespace miscal {

void SceneConfig::validate() const {
  if (n_points <= 0) {
    throw ConfigError("scene: n_points must be > 0");
  }
  if (!(range_min_m > 0.0) || !(range_max_m > range_min_m)) {
    throw ConfigError("scene: need 0 < range_min < range_max");
  }
  if (pixel_noise_sigma_px < 0.0) {
    throw ConfigError("scene: pixel noise sigma must be >= 0");
  }
  if (image_fraction <= 0.0 || image_fraction > 1.0) {
    throw ConfigError("scene: image_fraction must be in (0, 1]");
  }
  double prev_max = 0.0;
  for (const RangeBucket& b : buckets) {
    if (!(b.max_m > b.min_m) || b.min_m < prev_max) {
      throw ConfigError("scene: buckets must be ascending and non-overlapping");
    }
    prev_max = b.max_m;
  }
}

RigidTransform canonical_extrinsics() {
  // sensor x forward / y left / z up  ->  camera x right / y down / z forward
  RotationMatrix r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return {r, Eigen::Vector3d(0.1, -0.3, 0.2)};
}

SyntheticScene generate_scene(const SceneConfig& cfg, Rng& rng) {
  cfg.validate();
  const CameraIntrinsics k = CameraIntrinsics::reference();

  SyntheticScene scene;
  scene.truth_extrinsics = canonical_extrinsics();
  scene.points.reserve(cfg.n_points);
  const double f = cfg.image_fraction;
  for (int i = 0; i < cfg.n_points; ++i) {
    const double u = k.cx + (rng.uniform(0.0, k.width) - k.cx) * f;
    const double v = k.cy + (rng.uniform(0.0, k.height) - k.cy) * f;
    const double z = rng.uniform(cfg.range_min_m, cfg.range_max_m);
    scene.points.emplace_back((u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z);
  }

  // HFOV is 30 degrees; keep box centers inside it with a margin.
  const double kMaxAzimuthRad = deg2rad(14.0);
  for (size_t bi = 0; bi < cfg.buckets.size(); ++bi) {
    const RangeBucket& bucket = cfg.buckets[bi];
    for (int i = 0; i < cfg.n_boxes_per_bucket; ++i) {
      const double r = rng.uniform(bucket.min_m, bucket.max_m);
      const double az = rng.uniform(-kMaxAzimuthRad, kMaxAzimuthRad);
      BevBox box;
      box.cx = r * std::sin(az);
      box.cy = r * std::cos(az);
      box.length = rng.uniform(4.0, 16.0);
      box.width = rng.uniform(2.0, 3.0);
      box.yaw = rng.uniform(0.0, 2.0 * kPi);
      scene.boxes.push_back({box, static_cast<int>(bi)});
    }
  }
  return scene;
}

SyntheticScene generate_scene(const SceneConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_scene(cfg, rng);
}

std::vector<Correspondence> make_correspondences(const SyntheticScene& scene,
                                                 const CameraIntrinsics& k,
                                                 const EulerMisalignment& dr,
                                                 double noise_sigma_px,
                                                 Rng& rng) {
  const RotationMatrix r = rotation_from_misalignment(dr);
  std::vector<Correspondence> out;
  out.reserve(scene.points.size());
  for (const Point3& p : scene.points) {
    const Point3 q = r * p;
    if (!(q.z() > 0.0)) continue;
    PixelPoint tgt{k.fx * q.x() / q.z() + k.cx, k.fy * q.y() / q.z() + k.cy};
    if (noise_sigma_px > 0.0) {
      tgt.u += rng.gaussian(0.0, noise_sigma_px);
      tgt.v += rng.gaussian(0.0, noise_sigma_px);
    }
    if (tgt.u < 0.0 || tgt.u >= k.width || tgt.v < 0.0 || tgt.v >= k.height) {
      continue;
    }
    const auto [src, depth] = project(p, k);
    out.push_back({normalize(src, k), normalize(tgt, k)});
  }
  if (out.size() < 3) {
    throw DegenerateScene("make_correspondences: only " +
                          std::to_string(out.size()) + " pairs survived");
  }
  return out;
}

}  // namespace miscal
