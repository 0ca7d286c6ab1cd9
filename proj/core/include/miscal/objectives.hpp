// Reference implementations of the multi-task training objectives with
// analytic gradients: focal classification loss, Laplacian
// negative-log-likelihood regression terms for 2D/3D box parameters, and the
// misalignment regression loss. Natural logarithm throughout.
#pragma once

#include <vector>

#include "miscal/geometry.hpp"

namespace miscal {

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

/// Per-task weights; defaults are the values the losses are normally run with.
struct MultiTaskWeights {
  double w_offset_2d = 1.0;    // W_o
  double w_class = 2.0;        // W_c
  double w_size_2d = 0.1;      // W_s
  double w_offset_3d = 0.25;   // W_o-hat
  double w_size_3d = 1.0;      // W_s-hat
  double w_range = 1.5;        // W_d
  double w_orientation = 0.1;  // W_phi
  double w_miscal = 0.4;       // W_theta
};

/// One Laplacian NLL term: |prediction - target| / b + log b.
struct LaplacianTerm {
  double prediction = 0.0;
  double target = 0.0;
  double diversity_b = 1.0;
};

struct Object2d {
  LaplacianTerm offset_x, offset_y, width, height;
};

struct Object3d {
  LaplacianTerm offset_x, offset_y, width, length, height;
  double range_pred = 0.0, range_target = 0.0;            // L1, weight W_d
  double orientation_pred = 0.0, orientation_target = 0.0;  // L1, weight W_phi
};

/// Misalignment regression: three axes, each with its own diversity.
struct MiscalTerm {
  EulerMisalignment pred;
  EulerMisalignment target;
  double b_roll = 1.0, b_pitch = 1.0, b_yaw = 1.0;
};

/// Everything a single training sample contributes to the total loss.
struct LossSample {
  std::vector<double> class_probs;  // per-pixel probability of the true class
  std::vector<Object2d> objects_2d;
  std::vector<Object3d> objects_3d;
  MiscalTerm miscal;
};

struct LossBreakdown {
  double class_loss = 0.0;
  double two_d = 0.0;
  double three_d = 0.0;
  double miscal = 0.0;
  double total = 0.0;
};

double laplace_nll_term(const LaplacianTerm& t);

/// -(w_class / N) * sum alpha (1-p)^gamma log p over pixels.
/// Throws DomainError for p outside (0, 1].
double focal_loss(const std::vector<double>& class_probs, const FocalParams& params,
                  double w_class);

/// Object-averaged 2D offset/size NLL terms.
double loss_2d(const std::vector<Object2d>& objects, const MultiTaskWeights& w);

/// Object-averaged 3D offset/size NLL terms plus L1 range and orientation.
double loss_3d(const std::vector<Object3d>& objects, const MultiTaskWeights& w);

/// w_miscal * (sum_axes |pred - target| / b_axis + log(b_roll b_pitch b_yaw)).
double loss_miscal(const MiscalTerm& t, double w_miscal);

LossBreakdown total_loss(const LossSample& sample, const FocalParams& params,
                         const MultiTaskWeights& w);

struct LaplacianTermGrad {
  double d_prediction = 0.0;
  double d_diversity_b = 0.0;
};

struct Object2dGrad {
  LaplacianTermGrad offset_x, offset_y, width, height;
};

struct Object3dGrad {
  LaplacianTermGrad offset_x, offset_y, width, length, height;
  double d_range_pred = 0.0;
  double d_orientation_pred = 0.0;
};

struct MiscalGrad {
  double d_pred[3] = {0, 0, 0};  // roll, pitch, yaw
  double d_b[3] = {0, 0, 0};
};

struct LossGradients {
  std::vector<double> d_class_probs;
  std::vector<Object2dGrad> objects_2d;
  std::vector<Object3dGrad> objects_3d;
  MiscalGrad miscal;
  /// True when some L1 residual is exactly zero; the gradient there uses the
  /// minimum-norm subgradient 0.
  bool subgradient_ambiguity = false;
};

/// Partial derivatives of total_loss with respect to every prediction and
/// every diversity parameter.
LossGradients analytic_gradients(const LossSample& sample, const FocalParams& params,
                                 const MultiTaskWeights& w);

}  // namespace miscal
