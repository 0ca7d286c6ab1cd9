// Temporal fusion of per-frame estimates, misalignment verdicts, and
// extrinsic self-correction.
#pragma once

#include <vector>

#include "miscal/estimator.hpp"
#include "miscal/geometry.hpp"

namespace miscal {

enum class WeightRule { kInverseVariance, kInverseSigma };

/// Sliding window of time-ordered estimates; pushing a new estimate evicts
/// everything older than `span_s` relative to the newest timestamp.
class EstimateWindow {
 public:
  explicit EstimateWindow(double span_s = 5.0) : span_s_(span_s) {}

  void push(const MisalignmentEstimate& e);
  const std::vector<MisalignmentEstimate>& estimates() const { return estimates_; }
  double span_s() const { return span_s_; }
  bool empty() const { return estimates_.empty(); }

 private:
  double span_s_;
  std::vector<MisalignmentEstimate> estimates_;
};

struct FusedEstimate {
  EulerMisalignment dr;
  Eigen::Vector3d sigma_deg = Eigen::Vector3d::Zero();
  int n_fused = 0;
  int n_filtered = 0;
};

struct DetectionVerdict {
  bool positive = false;
  double threshold_deg = 0.1;
};

/// Keeps estimates whose every axis sigma is <= sigma_max; order-preserving;
/// an empty result is valid and handled by the caller.
std::vector<MisalignmentEstimate> filter_by_uncertainty(
    const std::vector<MisalignmentEstimate>& estimates, double sigma_max_deg = 0.3);

/// Per-axis weighted mean. Inverse-variance weights give the minimum-variance
/// combination: fused sigma = sqrt(1 / sum(1/sigma_i^2)) per axis.
/// Throws NothingToFuse on empty input.
FusedEstimate fuse(const std::vector<MisalignmentEstimate>& estimates,
                   WeightRule rule = WeightRule::kInverseVariance);

/// filter_by_uncertainty then fuse, with n_filtered recorded.
FusedEstimate fuse_filtered(const std::vector<MisalignmentEstimate>& estimates,
                            double sigma_max_deg = 0.3,
                            WeightRule rule = WeightRule::kInverseVariance);

/// Positive when the largest per-axis magnitude strictly exceeds the
/// threshold.
DetectionVerdict classify_misalignment(const FusedEstimate& f, double threshold_deg = 0.1);
DetectionVerdict classify_misalignment(const EulerMisalignment& dr,
                                       double threshold_deg = 0.1);

/// Right-composes t with the inverse of the fused fault rotation, so a fault
/// injected by perturb_transform(t, dr) is exactly undone when f.dr == dr.
RigidTransform correct_transform(const RigidTransform& t, const FusedEstimate& f);

/// Residual rotation between an injected fault and an estimate.
struct AngularResidual {
  double angle_deg = 0.0;               // geodesic angle of R(inj) * R(est)^-1
  Eigen::Vector3d per_axis_deg{0, 0, 0};  // signed injected - estimate, per axis
};

AngularResidual residual_misalignment(const EulerMisalignment& injected,
                                      const EulerMisalignment& estimate);

}  // namespace miscal
