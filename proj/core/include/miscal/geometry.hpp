// Rotation and pinhole-projection primitives.
//
// Conventions used throughout the toolkit:
//   - camera frame: x right, y down, z forward (optical axis)
//   - angles cross API boundaries in degrees, internals are radians
//   - a misalignment (roll, pitch, yaw) is the rotation about the camera
//     x, y, z axes respectively; the exact rotation is the matrix
//     exponential of the corresponding skew matrix (order-free)
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <utility>
#include <vector>

#include "miscal/errors.hpp"

namespace miscal {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

using RotationMatrix = Eigen::Matrix3d;
using Point3 = Eigen::Vector3d;

/// Rotational offset of the depth sensor relative to the camera, in degrees.
/// roll is about the camera x axis (right), pitch about y (down), yaw about
/// z (optical axis, i.e. the in-plane image rotation).
struct EulerMisalignment {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;

  Eigen::Vector3d radians() const {
    return {deg2rad(roll_deg), deg2rad(pitch_deg), deg2rad(yaw_deg)};
  }
  Eigen::Vector3d degrees() const { return {roll_deg, pitch_deg, yaw_deg}; }

  double max_abs_deg() const;
  EulerMisalignment negated() const { return {-roll_deg, -pitch_deg, -yaw_deg}; }

  bool operator==(const EulerMisalignment&) const = default;
};

/// Pinhole camera: focal lengths and principal point in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0 && fy > 0 && cx > 0 && cx < width && cy > 0 && cy < height;
  }
  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse_matrix() const;

  /// Desk-scale reference camera: 3840x2160, 30 degree horizontal FOV.
  static CameraIntrinsics reference();
};

/// Rigid map from the depth sensor frame into the camera frame.
struct RigidTransform {
  RotationMatrix rotation = RotationMatrix::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  RigidTransform compose(const RigidTransform& rhs) const;
  RigidTransform inverse() const;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

/// Homogeneous normalized image point (K^-1 applied to a pixel).
/// z is 1 for renormalized image measurements; model-generated
/// correspondences may carry an un-renormalized third component.
struct NormalizedPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

/// Sparse depth raster; value 0 means "no return", otherwise camera-frame z
/// in meters. Dimensions match the producing intrinsics.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, width*height

  double at(int u, int v) const { return values[static_cast<size_t>(v) * width + u]; }
  double& at(int u, int v) { return values[static_cast<size_t>(v) * width + u]; }
  int count_nonzero() const;
};

/// Exact rotation for a misalignment: exp(skew(w)) with w = (roll, pitch,
/// yaw) in radians. Orthonormal to machine precision for any finite input.
RotationMatrix rotation_from_misalignment(const EulerMisalignment& dr);

/// First-order rotation model:
///   [[1, -yaw, pitch], [yaw, 1, -roll], [-pitch, roll, 1]]  (radians).
/// Not orthonormal; valid for |components| within a few degrees.
Eigen::Matrix3d small_angle_matrix(const EulerMisalignment& dr);

/// Inverse of rotation_from_misalignment via the matrix log (axis-angle).
EulerMisalignment misalignment_from_rotation(const RotationMatrix& r);

/// Rotation angle of r in degrees.
double rotation_angle_deg(const RotationMatrix& r);

bool is_rotation_matrix(const Eigen::Matrix3d& r, double tol = 1e-9);

/// Pinhole projection. Throws NonPositiveDepth for z <= 0.
std::pair<PixelPoint, double> project(const Point3& p, const CameraIntrinsics& k);

/// K^-1 applied to a pixel; z component is 1.
NormalizedPoint normalize(const PixelPoint& p, const CameraIntrinsics& k);

/// Pixel-to-pixel map K * r * K^-1 induced by a pure camera rotation.
/// r may be an exact rotation or a small-angle matrix.
Eigen::Matrix3d homography(const CameraIntrinsics& k, const Eigen::Matrix3d& r);

/// Apply a homography to a pixel (with the projective division).
PixelPoint apply_homography(const Eigen::Matrix3d& h, const PixelPoint& p);

/// Z-buffered projection of sensor-frame points through t into a depth
/// raster. Nearest depth wins per pixel cell; exact ties keep the first
/// processed point. Out-of-frame and non-positive-depth points are skipped.
DepthImage render_depth_image(const std::vector<Point3>& points,
                              const RigidTransform& t,
                              const CameraIntrinsics& k);

/// Cross-range displacement of a ray deviated by `angle_rad` at `range_m`:
/// range * tan(angle).
double lateral_error(double angle_rad, double range_m);

}  // namespace miscal
