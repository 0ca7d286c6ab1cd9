// Misalignment recovery from normalized point correspondences.
//
// Each pair (p, p') related by a small camera rotation contributes three
// linear rows in the unknown angle vector (roll, pitch, yaw), radians:
//
//     ( 0   z   -y | x' - x )
//     (-z   0    x | y' - y )
//     ( y  -x    0 | z' - z )
//
// The single-pass least-squares solution carries a small-angle bias that a
// few Gauss-Newton relinearizations remove: rotate the targets back by the
// current estimate, re-solve for the increment, compose.
#pragma once

#include <vector>

#include "miscal/geometry.hpp"
#include "miscal/scene.hpp"

namespace miscal {

struct LinearSystemRow {
  Eigen::Vector3d coeff;  // multiplies (roll, pitch, yaw) in radians
  double rhs = 0.0;
};

struct LinearSystem {
  std::vector<LinearSystemRow> rows;  // 3 per correspondence
};

/// Per-frame estimation output; angles and per-axis uncertainties in degrees.
struct MisalignmentEstimate {
  EulerMisalignment dr;
  Eigen::Vector3d sigma_deg = Eigen::Vector3d::Zero();
  double timestamp_s = 0.0;
  int n_used = 0;
  bool converged = true;
  bool condition_warning = false;

  double sigma(int axis) const { return sigma_deg[axis]; }
  double max_sigma_deg() const { return sigma_deg.maxCoeff(); }
};

struct EstimatorConfig {
  int max_gn_iterations = 10;
  double convergence_tol_deg = 1e-7;
  int min_correspondences = 3;
  double condition_warn_threshold = 1e6;
  double condition_fail_threshold = 1e8;

  void validate() const;
};

LinearSystem build_linear_system(const std::vector<Correspondence>& cs);

/// Least-squares solve of the stacked system with per-axis uncertainty
/// sigma_j = sqrt(s^2 [(M^T M)^-1]_jj), s^2 = RSS / (rows - 3), both
/// converted to degrees. Throws TooFewCorrespondences / RankDeficient.
MisalignmentEstimate solve_small_angle(const LinearSystem& sys,
                                       const EstimatorConfig& cfg);

/// Iterated relinearization starting from `init`. Returns the composed
/// estimate with sigma recomputed at the final iterate; sets converged=false
/// instead of throwing when the iteration budget runs out.
MisalignmentEstimate refine_gauss_newton(const std::vector<Correspondence>& cs,
                                         const MisalignmentEstimate& init,
                                         const EstimatorConfig& cfg);

/// build -> solve -> refine, with the frame timestamp attached.
MisalignmentEstimate estimate_frame(const std::vector<Correspondence>& cs,
                                    const EstimatorConfig& cfg,
                                    double timestamp_s = 0.0);

}  // namespace miscal
