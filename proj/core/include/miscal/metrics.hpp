// Verification metrics: misalignment-detection accuracy, estimation-error
// sweeps, rotated-box IoU and max-F1 detection scoring by range bucket.
#pragma once

#include <optional>
#include <vector>

#include "miscal/fusion.hpp"
#include "miscal/geometry.hpp"
#include "miscal/metrics_types.hpp"
#include "miscal/scene.hpp"

namespace miscal {

/// Updates the confusion cell for one snippet/frame. Injected positivity uses
/// the same strict max-axis rule as the predicted verdict.
MdaCounts mda_accumulate(MdaCounts counts, const DetectionVerdict& verdict,
                         const EulerMisalignment& injected, double threshold_deg = 0.1);

struct PrecisionRecall {
  std::optional<double> precision;  // empty when tp + fp == 0
  std::optional<double> recall;     // empty when tp + fn == 0
};

PrecisionRecall precision_recall(const MdaCounts& counts);

struct SweepSample {
  EulerMisalignment injected;
  EulerMisalignment estimate;
};

/// Groups samples by (axis, injected grid value) and emits per-cell mean
/// absolute error and population std for every axis.
std::vector<ErrorSweepRow> error_sweep(const std::vector<SweepSample>& results);

/// Intersection-over-union of two rotated rectangles on the ground plane,
/// via convex polygon clipping.
double bev_iou(const BevBox& a, const BevBox& b);

/// One detection after greedy score-ordered matching.
struct MatchedDetection {
  double score = 0.0;
  bool matched = false;
};

/// Greedy one-to-one matching in descending score order; a detection takes
/// the highest-IoU unmatched ground truth with IoU >= iou_min.
std::vector<MatchedDetection> greedy_match(const std::vector<Detection>& dets,
                                           const std::vector<BevBox>& gts,
                                           double iou_min);

/// Max F1 over score thresholds for an already-matched (possibly pooled)
/// detection set. Conventions: no gts and no dets -> 1, no gts with dets -> 0.
double max_f1_from_matches(std::vector<MatchedDetection> matches, int64_t n_gts);

/// Max F1 over all thresholds drawn from the detection scores.
double max_f1(const std::vector<Detection>& dets, const std::vector<BevBox>& gts,
              double iou_min = 0.1);

/// Geometric detection-degradation surrogate. A residual rotation displaces
/// each ground-truth box by the cross-range error at its range: lateral
/// (perpendicular to the ray) from the yaw component, longitudinal (along
/// the ray) from the pitch component; scores decay with displacement.
struct DetectionSimConfig {
  double iou_min = 0.1;
  /// Displacement scale for the perturbation-trained model variants.
  double robustness_factor = 0.6;
  /// Score e-folding distance in meters.
  double score_decay_m = 2.0;
};

/// One simulated detection per scene box, in box order.
std::vector<Detection> simulate_detections(const SyntheticScene& scene,
                                           const EulerMisalignment& residual,
                                           double displacement_factor,
                                           const DetectionSimConfig& cfg);

enum class EvalVariant { kBaseline, kUncorrected, kCorrected };

/// Residual rotation seen by a variant: the injected fault for kBaseline and
/// kUncorrected, injected composed with the inverse estimate for kCorrected.
EulerMisalignment variant_residual(const EulerMisalignment& injected,
                                   const EulerMisalignment& estimate,
                                   EvalVariant variant);

double variant_displacement_factor(EvalVariant variant, const DetectionSimConfig& cfg);

/// Per-bucket max-F1 for one scene under one variant.
std::vector<double> bucketed_detection_eval(const SyntheticScene& scene,
                                            const EulerMisalignment& injected,
                                            const EulerMisalignment& estimate,
                                            EvalVariant variant,
                                            const DetectionSimConfig& cfg);

}  // namespace miscal
