#include "miscal/fusion.hpp"

#include <cmath>

#include "miscal/errors.hpp"

namespace miscal {

void EstimateWindow::push(const MisalignmentEstimate& e) {
  if (!estimates_.empty() && e.timestamp_s < estimates_.back().timestamp_s) {
    throw DomainError("EstimateWindow: timestamps must be non-decreasing");
  }
  estimates_.push_back(e);
  const double newest = estimates_.back().timestamp_s;
  size_t first = 0;
  while (first < estimates_.size() && newest - estimates_[first].timestamp_s > span_s_) {
    ++first;
  }
  if (first > 0) {
    estimates_.erase(estimates_.begin(), estimates_.begin() + first);
  }
}

std::vector<MisalignmentEstimate> filter_by_uncertainty(
    const std::vector<MisalignmentEstimate>& estimates, double sigma_max_deg) {
  std::vector<MisalignmentEstimate> kept;
  kept.reserve(estimates.size());
  for (const MisalignmentEstimate& e : estimates) {
    if (e.max_sigma_deg() <= sigma_max_deg) {
      kept.push_back(e);
    }
  }
  return kept;
}

FusedEstimate fuse(const std::vector<MisalignmentEstimate>& estimates, WeightRule rule) {
  if (estimates.empty()) {
    throw NothingToFuse("fuse: empty estimate list");
  }
  FusedEstimate out;
  out.n_fused = static_cast<int>(estimates.size());
  for (int axis = 0; axis < 3; ++axis) {
    double wsum = 0.0, vsum = 0.0, w2s2 = 0.0;
    for (const MisalignmentEstimate& e : estimates) {
      const double sigma = e.sigma_deg(axis);
      const double w = rule == WeightRule::kInverseVariance ? 1.0 / (sigma * sigma)
                                                            : 1.0 / sigma;
      wsum += w;
      vsum += w * e.dr.degrees()(axis);
      w2s2 += w * w * sigma * sigma;
    }
    const double mean = vsum / wsum;
    if (axis == 0) out.dr.roll_deg = mean;
    if (axis == 1) out.dr.pitch_deg = mean;
    if (axis == 2) out.dr.yaw_deg = mean;
    out.sigma_deg(axis) = std::sqrt(w2s2) / wsum;
  }
  return out;
}

FusedEstimate fuse_filtered(const std::vector<MisalignmentEstimate>& estimates,
                            double sigma_max_deg, WeightRule rule) {
  const std::vector<MisalignmentEstimate> kept =
      filter_by_uncertainty(estimates, sigma_max_deg);
  FusedEstimate out = fuse(kept, rule);
  out.n_filtered = static_cast<int>(estimates.size() - kept.size());
  return out;
}

DetectionVerdict classify_misalignment(const FusedEstimate& f, double threshold_deg) {
  return classify_misalignment(f.dr, threshold_deg);
}

DetectionVerdict classify_misalignment(const EulerMisalignment& dr, double threshold_deg) {
  return {dr.max_abs_deg() > threshold_deg, threshold_deg};
}

RigidTransform correct_transform(const RigidTransform& t, const FusedEstimate& f) {
  const RotationMatrix correction =
      rotation_from_misalignment(f.dr).transpose();  // inverse of the fault rotation
  return t.compose({correction, Eigen::Vector3d::Zero()});
}

AngularResidual residual_misalignment(const EulerMisalignment& injected,
                                      const EulerMisalignment& estimate) {
  AngularResidual r;
  const RotationMatrix rel = rotation_from_misalignment(injected) *
                             rotation_from_misalignment(estimate).transpose();
  r.angle_deg = rotation_angle_deg(rel);
  r.per_axis_deg = injected.degrees() - estimate.degrees();
  return r;
}

}  // namespace miscal
