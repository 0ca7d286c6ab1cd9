#include "miscal/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace miscal {

double BevBox::range() const { return std::hypot(cx, cy); }

MdaCounts mda_accumulate(MdaCounts counts, const DetectionVerdict& verdict,
                         const EulerMisalignment& injected, double threshold_deg) {
  const bool truth = injected.max_abs_deg() > threshold_deg;
  if (truth && verdict.positive) {
    ++counts.tp;
  } else if (!truth && !verdict.positive) {
    ++counts.tn;
  } else if (!truth && verdict.positive) {
    ++counts.fp;
  } else {
    ++counts.fn;
  }
  return counts;
}

PrecisionRecall precision_recall(const MdaCounts& c) {
  PrecisionRecall pr;
  if (c.tp + c.fp > 0) {
    pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  return pr;
}

std::vector<ErrorSweepRow> error_sweep(const std::vector<SweepSample>& results) {
  // key: (axis, injected value in micro-degrees)
  std::map<std::pair<int, long long>, std::vector<Eigen::Vector3d>> cells;
  for (const SweepSample& s : results) {
    const Eigen::Vector3d abs_err =
        (s.injected.degrees() - s.estimate.degrees()).cwiseAbs();
    for (int axis = 0; axis < 3; ++axis) {
      const long long key = std::llround(s.injected.degrees()(axis) * 1e6);
      cells[{axis, key}].push_back(abs_err);
    }
  }
  std::vector<ErrorSweepRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, errs] : cells) {
    ErrorSweepRow row;
    row.axis = key.first;
    row.injected_deg = static_cast<double>(key.second) * 1e-6;
    row.n = static_cast<int64_t>(errs.size());
    for (int axis = 0; axis < 3; ++axis) {
      double mean = 0.0;
      for (const Eigen::Vector3d& e : errs) mean += e(axis);
      mean /= static_cast<double>(errs.size());
      double var = 0.0;
      for (const Eigen::Vector3d& e : errs) var += (e(axis) - mean) * (e(axis) - mean);
      var /= static_cast<double>(errs.size());
      row.mean_abs_err[axis] = mean;
      row.err_std[axis] = std::sqrt(var);
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

constexpr double kEdgeTol = 1e-9;  // collinear-edge tolerance, meters

using Poly = std::vector<Eigen::Vector2d>;

std::array<Eigen::Vector2d, 4> box_corners(const BevBox& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hl = 0.5 * b.length, hw = 0.5 * b.width;
  auto corner = [&](double dx, double dy) {
    return Eigen::Vector2d(b.cx + c * dx - s * dy, b.cy + s * dx + c * dy);
  };
  // counterclockwise
  return {corner(hl, hw), corner(-hl, hw), corner(-hl, -hw), corner(hl, -hw)};
}

double poly_area(const Poly& p) {
  double a = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const Eigen::Vector2d& u = p[i];
    const Eigen::Vector2d& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * std::abs(a);
}

/// Sutherland-Hodgman clip of `subject` against the half plane left of a->b.
Poly clip_edge(const Poly& subject, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  Poly out;
  const Eigen::Vector2d e = b - a;
  auto side = [&](const Eigen::Vector2d& p) {
    return e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
  };
  for (size_t i = 0; i < subject.size(); ++i) {
    const Eigen::Vector2d& p = subject[i];
    const Eigen::Vector2d& q = subject[(i + 1) % subject.size()];
    const double dp = side(p);
    const double dq = side(q);
    if (dp >= -kEdgeTol) out.push_back(p);
    if ((dp > kEdgeTol && dq < -kEdgeTol) || (dp < -kEdgeTol && dq > kEdgeTol)) {
      out.push_back(p + dp / (dp - dq) * (q - p));
    }
  }
  return out;
}

}  // namespace

double bev_iou(const BevBox& a, const BevBox& b) {
  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  Poly poly(ca.begin(), ca.end());
  for (int i = 0; i < 4 && !poly.empty(); ++i) {
    poly = clip_edge(poly, cb[i], cb[(i + 1) % 4]);
  }
  if (poly.size() < 3) return 0.0;
  const double inter = poly_area(poly);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<MatchedDetection> greedy_match(const std::vector<Detection>& dets,
                                           const std::vector<BevBox>& gts,
                                           double iou_min) {
  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return dets[i].score > dets[j].score;
  });

  std::vector<bool> gt_taken(gts.size(), false);
  std::vector<MatchedDetection> matches(dets.size());
  for (size_t oi : order) {
    const Detection& det = dets[oi];
    double best_iou = 0.0;
    int best_gt = -1;
    for (size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double iou = bev_iou(det.box, gts[gi]);
      if (iou >= iou_min && iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0) {
      gt_taken[best_gt] = true;
      matches[oi] = {det.score, true};
    } else {
      matches[oi] = {det.score, false};
    }
  }
  return matches;
}

double max_f1_from_matches(std::vector<MatchedDetection> matches, int64_t n_gts) {
  if (n_gts == 0) return matches.empty() ? 1.0 : 0.0;
  if (matches.empty()) return 0.0;
  std::stable_sort(matches.begin(), matches.end(),
                   [](const MatchedDetection& a, const MatchedDetection& b) {
                     return a.score > b.score;
                   });
  double best = 0.0;
  int64_t tp = 0;
  for (size_t k = 0; k < matches.size(); ++k) {
    if (matches[k].matched) ++tp;
    // a threshold can only sit between distinct scores
    if (k + 1 < matches.size() && matches[k + 1].score == matches[k].score) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_gts);
    if (precision + recall > 0.0) {
      best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
  }
  return best;
}

double max_f1(const std::vector<Detection>& dets, const std::vector<BevBox>& gts,
              double iou_min) {
  return max_f1_from_matches(greedy_match(dets, gts, iou_min),
                             static_cast<int64_t>(gts.size()));
}

std::vector<Detection> simulate_detections(const SyntheticScene& scene,
                                           const EulerMisalignment& residual,
                                           double displacement_factor,
                                           const DetectionSimConfig& cfg) {
  const double lat_rad = deg2rad(residual.yaw_deg);
  const double lon_rad = deg2rad(residual.pitch_deg);
  std::vector<Detection> dets;
  dets.reserve(scene.boxes.size());
  for (const SceneBox& sb : scene.boxes) {
    const BevBox& gt = sb.box;
    const double range = gt.range();
    const Eigen::Vector2d ray(gt.cx / range, gt.cy / range);
    const Eigen::Vector2d perp(ray.y(), -ray.x());
    const Eigen::Vector2d disp =
        displacement_factor * (lateral_error(lat_rad, range) * perp +
                               lateral_error(lon_rad, range) * ray);
    Detection det;
    det.box = gt;
    det.box.cx += disp.x();
    det.box.cy += disp.y();
    det.score = std::exp(-disp.norm() / cfg.score_decay_m);
    dets.push_back(det);
  }
  return dets;
}

EulerMisalignment variant_residual(const EulerMisalignment& injected,
                                   const EulerMisalignment& estimate,
                                   EvalVariant variant) {
  if (variant == EvalVariant::kCorrected) {
    return misalignment_from_rotation(rotation_from_misalignment(injected) *
                                      rotation_from_misalignment(estimate).transpose());
  }
  return injected;
}

double variant_displacement_factor(EvalVariant variant, const DetectionSimConfig& cfg) {
  return variant == EvalVariant::kBaseline ? 1.0 : cfg.robustness_factor;
}

std::vector<double> bucketed_detection_eval(const SyntheticScene& scene,
                                            const EulerMisalignment& injected,
                                            const EulerMisalignment& estimate,
                                            EvalVariant variant,
                                            const DetectionSimConfig& cfg) {
  const EulerMisalignment residual = variant_residual(injected, estimate, variant);
  const std::vector<Detection> dets =
      simulate_detections(scene, residual, variant_displacement_factor(variant, cfg), cfg);

  int n_buckets = 0;
  for (const SceneBox& sb : scene.boxes) n_buckets = std::max(n_buckets, sb.bucket_index + 1);

  std::vector<double> f1(n_buckets, 1.0);
  for (int b = 0; b < n_buckets; ++b) {
    std::vector<BevBox> gts;
    std::vector<Detection> bucket_dets;
    for (size_t i = 0; i < scene.boxes.size(); ++i) {
      if (scene.boxes[i].bucket_index == b) {
        gts.push_back(scene.boxes[i].box);
        bucket_dets.push_back(dets[i]);
      }
    }
    f1[b] = max_f1(bucket_dets, gts, cfg.iou_min);
  }
  return f1;
}

}  // namespace miscal
