// Plain data types shared by the metrics and scene modules.
#pragma once

#include <cstdint>

namespace miscal {

/// Misalignment-detection confusion counts.
struct MdaCounts {
  int64_t tp = 0;
  int64_t tn = 0;
  int64_t fp = 0;
  int64_t fn = 0;
};

/// Bird's-eye-view box on the ground plane: center (x lateral, y forward)
/// in meters, extents in meters, heading in radians.
struct BevBox {
  double cx = 0.0;
  double cy = 0.0;
  double length = 0.0;
  double width = 0.0;
  double yaw = 0.0;

  double range() const;
  double area() const { return length * width; }
};

struct Detection {
  BevBox box;
  double score = 0.0;  // in [0, 1]
};

/// One grid cell of the estimation-error sweep: all errors in degrees.
struct ErrorSweepRow {
  int axis = 0;  // 0 roll, 1 pitch, 2 yaw
  double injected_deg = 0.0;
  double mean_abs_err[3] = {0, 0, 0};
  double err_std[3] = {0, 0, 0};
  int64_t n = 0;
};

}  // namespace miscal
