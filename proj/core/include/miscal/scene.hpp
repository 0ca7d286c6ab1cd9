// Synthetic scenes: frustum point clouds, range-bucketed ground-truth boxes,
// and the point correspondences the estimator consumes.
#pragma once

#include <cstdint>
#include <vector>

#include "miscal/geometry.hpp"
#include "miscal/metrics_types.hpp"
#include "miscal/rng.hpp"

namespace miscal {

struct RangeBucket {
  double min_m = 0.0;
  double max_m = 0.0;
};

struct SceneConfig {
  int n_points = 500;
  double range_min_m = 200.0;
  double range_max_m = 500.0;
  int n_boxes_per_bucket = 30;
  std::vector<RangeBucket> buckets = {{200, 300}, {300, 400}, {400, 500}};
  double pixel_noise_sigma_px = 2.0;
  /// Shrinks the sampled image region around the principal point; 1 = full
  /// frame, 0.5 = central quarter of the image area.
  double image_fraction = 1.0;
  uint64_t seed = 0;

  void validate() const;
};

/// Ground-truth box with the bucket it was placed in.
struct SceneBox {
  BevBox box;
  int bucket_index = 0;
};

struct SyntheticScene {
  std::vector<Point3> points;  // camera frame, all in-frustum
  std::vector<SceneBox> boxes;
  RigidTransform truth_extrinsics;  // sensor frame -> camera frame
};

/// A (source, target) pair of normalized image points. Scene-generated pairs
/// are renormalized (z = 1 both sides).
struct Correspondence {
  NormalizedPoint source;
  NormalizedPoint target;
};

/// Deterministic scene for (cfg, rng). Points are pixel-uniform and
/// depth-uniform inside the (possibly shrunk) frustum; boxes get vehicle-like
/// extents (length 4-16 m, width 2-3 m, uniform heading) at bucket ranges.
/// Throws ConfigError for degenerate configs.
SyntheticScene generate_scene(const SceneConfig& cfg, Rng& rng);

/// Same, seeded from cfg.seed.
SyntheticScene generate_scene(const SceneConfig& cfg);

/// The canonical sensor-to-camera extrinsics used by generated scenes:
/// sensor x forward / y left / z up mapped into camera x right / y down /
/// z forward, with a small lever arm.
RigidTransform canonical_extrinsics();

/// Build correspondences for a fault: source = projection of each scene
/// point, target = projection of the exactly-rotated point plus pixel noise,
/// renormalized. Pairs leaving the frame (or the positive-z half space) are
/// dropped. Throws DegenerateScene if fewer than 3 pairs survive.
std::vector<Correspondence> make_correspondences(const SyntheticScene& scene,
                                                 const CameraIntrinsics& k,
                                                 const EulerMisalignment& dr,
                                                 double noise_sigma_px,
                                                 Rng& rng);

}  // namespace miscal
