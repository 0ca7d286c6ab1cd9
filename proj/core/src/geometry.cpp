#include "miscal/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace miscal {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

}  // namespace

double EulerMisalignment::max_abs_deg() const {
  return std::max({std::abs(roll_deg), std::abs(pitch_deg), std::abs(yaw_deg)});
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::inverse_matrix() const {
  Eigen::Matrix3d k;
  k << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
  return k;
}

CameraIntrinsics CameraIntrinsics::reference() {
  CameraIntrinsics k;
  k.width = 3840;
  k.height = 2160;
  k.fx = k.fy = 1920.0 / std::tan(deg2rad(15.0));
  k.cx = 1920.0;
  k.cy = 1080.0;
  return k;
}

RigidTransform RigidTransform::compose(const RigidTransform& rhs) const {
  return {rotation * rhs.rotation, rotation * rhs.translation + translation};
}

RigidTransform RigidTransform::inverse() const {
  RotationMatrix rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

int DepthImage::count_nonzero() const {
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [](double v) { return v != 0.0; }));
}

RotationMatrix rotation_from_misalignment(const EulerMisalignment& dr) {
  const Eigen::Vector3d w = dr.radians();
  const double theta = w.norm();
  const Eigen::Matrix3d s = skew(w);
  if (theta < 1e-10) {
    // Two-term Taylor expansion; remainder O(theta^3) is below roundoff here.
    return RotationMatrix::Identity() + s + 0.5 * s * s;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return RotationMatrix::Identity() + a * s + b * s * s;
}

Eigen::Matrix3d small_angle_matrix(const EulerMisalignment& dr) {
  const Eigen::Vector3d w = dr.radians();
  return Eigen::Matrix3d::Identity() + skew(w);
}

EulerMisalignment misalignment_from_rotation(const RotationMatrix& r) {
  // vee of the antisymmetric part gives sin(theta) * axis.
  Eigen::Vector3d w(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                    0.5 * (r(1, 0) - r(0, 1)));
  const double s = w.norm();                    // sin(theta)
  const double c = 0.5 * (r.trace() - 1.0);     // cos(theta)
  const double theta = std::atan2(s, c);
  if (s > 1e-12) {
    w *= theta / s;
  }
  return {rad2deg(w.x()), rad2deg(w.y()), rad2deg(w.z())};
}

double rotation_angle_deg(const RotationMatrix& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  return rad2deg(std::acos(c));
}

bool is_rotation_matrix(const Eigen::Matrix3d& r, double tol) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

std::pair<PixelPoint, double> project(const Point3& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw NonPositiveDepth("project: point depth " + std::to_string(p.z()) +
                           " is not positive");
  }
  return {{k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy}, p.z()};
}

NormalizedPoint normalize(const PixelPoint& p, const CameraIntrinsics& k) {
  return {(p.u - k.cx) / k.fx, (p.v - k.cy) / k.fy, 1.0};
}

Eigen::Matrix3d homography(const CameraIntrinsics& k, const Eigen::Matrix3d& r) {
  return k.matrix() * r * k.inverse_matrix();
}

PixelPoint apply_homography(const Eigen::Matrix3d& h, const PixelPoint& p) {
  const Eigen::Vector3d q = h * Eigen::Vector3d(p.u, p.v, 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

DepthImage render_depth_image(const std::vector<Point3>& points,
                              const RigidTransform& t,
                              const CameraIntrinsics& k) {
  DepthImage img;
  img.width = k.width;
  img.height = k.height;
  img.values.assign(static_cast<size_t>(k.width) * k.height, 0.0);
  for (const Point3& p : points) {
    const Point3 q = t.apply(p);
    if (!(q.z() > 0.0)) continue;
    const double u = k.fx * q.x() / q.z() + k.cx;
    const double v = k.fy * q.y() / q.z() + k.cy;
    const int iu = static_cast<int>(std::floor(u));
    const int iv = static_cast<int>(std::floor(v));
    if (iu < 0 || iu >= k.width || iv < 0 || iv >= k.height) continue;
    double& cell = img.at(iu, iv);
    if (cell == 0.0 || q.z() < cell) {
      cell = q.z();
    }
  }
  return img;
}

double lateral_error(double angle_rad, double range_m) {
  return range_m * std::tan(angle_rad);
}

}  // namespace miscal
