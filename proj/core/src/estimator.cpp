#include "miscal/estimator.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "miscal/errors.hpp"

namespace miscal {

void EstimatorConfig::validate() const {
  if (max_gn_iterations < 0) {
    throw ConfigError("estimator: max_gn_iterations must be >= 0");
  }
  if (convergence_tol_deg <= 0.0) {
    throw ConfigError("estimator: convergence tolerance must be > 0");
  }
  if (min_correspondences < 3) {
    throw ConfigError("estimator: need at least 3 correspondences");
  }
}

LinearSystem build_linear_system(const std::vector<Correspondence>& cs) {
  if (cs.empty()) {
    throw EmptyInput("build_linear_system: no correspondences");
  }
  LinearSystem sys;
  sys.rows.reserve(3 * cs.size());
  for (const Correspondence& c : cs) {
    const double x = c.source.x, y = c.source.y, z = c.source.z;
    sys.rows.push_back({{0.0, z, -y}, c.target.x - x});
    sys.rows.push_back({{-z, 0.0, x}, c.target.y - y});
    sys.rows.push_back({{y, -x, 0.0}, c.target.z - z});
  }
  return sys;
}

namespace {

MisalignmentEstimate solve_rows(const LinearSystem& sys, const EstimatorConfig& cfg) {
  const int rows = static_cast<int>(sys.rows.size());
  if (rows < 3 * cfg.min_correspondences) {
    throw TooFewCorrespondences("solve_small_angle: " + std::to_string(rows / 3) +
                                " correspondences, minimum " +
                                std::to_string(cfg.min_correspondences));
  }
  Eigen::MatrixXd m(rows, 3);
  Eigen::VectorXd d(rows);
  for (int i = 0; i < rows; ++i) {
    m.row(i) = sys.rows[i].coeff;
    d(i) = sys.rows[i].rhs;
  }

  const Eigen::Matrix3d normal = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(2);
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

  MisalignmentEstimate est;
  if (!(cond < cfg.condition_fail_threshold)) {
    throw RankDeficient("solve_small_angle: normal-matrix condition " +
                        std::to_string(cond) + " exceeds " +
                        std::to_string(cfg.condition_fail_threshold));
  }
  est.condition_warning = cond > cfg.condition_warn_threshold;

  const Eigen::Vector3d theta = m.colPivHouseholderQr().solve(d);
  const Eigen::VectorXd residual = m * theta - d;
  const double s2 = residual.squaredNorm() / static_cast<double>(rows - 3);
  const Eigen::Matrix3d cov = s2 * normal.inverse();
  for (int j = 0; j < 3; ++j) {
    // Tiny floor keeps sigma strictly positive on synthetic exact data.
    est.sigma_deg(j) = std::max(rad2deg(std::sqrt(std::max(cov(j, j), 0.0))), 1e-12);
  }
  est.dr = {rad2deg(theta.x()), rad2deg(theta.y()), rad2deg(theta.z())};
  est.n_used = rows / 3;
  return est;
}

}  // namespace

MisalignmentEstimate solve_small_angle(const LinearSystem& sys,
                                       const EstimatorConfig& cfg) {
  return solve_rows(sys, cfg);
}

MisalignmentEstimate refine_gauss_newton(const std::vector<Correspondence>& cs,
                                         const MisalignmentEstimate& init,
                                         const EstimatorConfig& cfg) {
  if (cfg.max_gn_iterations == 0) {
    return init;
  }
  RotationMatrix rot = rotation_from_misalignment(init.dr);
  MisalignmentEstimate last = init;
  bool converged = false;
  for (int it = 0; it < cfg.max_gn_iterations; ++it) {
    std::vector<Correspondence> rotated;
    rotated.reserve(cs.size());
    for (const Correspondence& c : cs) {
      const Eigen::Vector3d q =
          rot.transpose() * Eigen::Vector3d(c.target.x, c.target.y, c.target.z);
      if (!(q.z() > 0.0)) continue;
      rotated.push_back({c.source, {q.x() / q.z(), q.y() / q.z(), 1.0}});
    }
    last = solve_rows(build_linear_system(rotated), cfg);
    rot = rot * rotation_from_misalignment(last.dr);
    if (last.dr.max_abs_deg() < cfg.convergence_tol_deg) {
      converged = true;
      break;
    }
  }
  MisalignmentEstimate out = last;
  out.dr = misalignment_from_rotation(rot);
  out.converged = converged;
  out.timestamp_s = init.timestamp_s;
  return out;
}

MisalignmentEstimate estimate_frame(const std::vector<Correspondence>& cs,
                                    const EstimatorConfig& cfg,
                                    double timestamp_s) {
  MisalignmentEstimate init = solve_small_angle(build_linear_system(cs), cfg);
  init.timestamp_s = timestamp_s;
  MisalignmentEstimate refined = refine_gauss_newton(cs, init, cfg);
  refined.timestamp_s = timestamp_s;
  return refined;
}

}  // namespace miscal
