#include "miscal/objectives.hpp"

#include <cmath>

#include "miscal/errors.hpp"

namespace miscal {

namespace {

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_b(double b) {
  if (!(b > 0.0)) {
    throw DomainError("laplace term: diversity b must be > 0");
  }
}

LaplacianTermGrad laplace_grad(const LaplacianTerm& t, double weight, bool& ambiguous) {
  check_b(t.diversity_b);
  const double r = t.prediction - t.target;
  if (r == 0.0) ambiguous = true;
  return {weight * sign0(r) / t.diversity_b,
          weight * (1.0 / t.diversity_b - std::abs(r) / (t.diversity_b * t.diversity_b))};
}

}  // namespace

double laplace_nll_term(const LaplacianTerm& t) {
  check_b(t.diversity_b);
  return std::abs(t.prediction - t.target) / t.diversity_b + std::log(t.diversity_b);
}

double focal_loss(const std::vector<double>& class_probs, const FocalParams& params,
                  double w_class) {
  if (class_probs.empty()) return 0.0;
  double sum = 0.0;
  for (double p : class_probs) {
    if (!(p > 0.0) || p > 1.0) {
      throw DomainError("focal_loss: probability outside (0, 1]");
    }
    sum += params.alpha * std::pow(1.0 - p, params.gamma) * std::log(p);
  }
  return -w_class / static_cast<double>(class_probs.size()) * sum;
}

double loss_2d(const std::vector<Object2d>& objects, const MultiTaskWeights& w) {
  if (objects.empty()) return 0.0;
  double sum = 0.0;
  for (const Object2d& o : objects) {
    sum += w.w_offset_2d * (laplace_nll_term(o.offset_x) + laplace_nll_term(o.offset_y));
    sum += w.w_size_2d * (laplace_nll_term(o.width) + laplace_nll_term(o.height));
  }
  return sum / static_cast<double>(objects.size());
}

double loss_3d(const std::vector<Object3d>& objects, const MultiTaskWeights& w) {
  if (objects.empty()) return 0.0;
  double sum = 0.0;
  for (const Object3d& o : objects) {
    sum += w.w_offset_3d * (laplace_nll_term(o.offset_x) + laplace_nll_term(o.offset_y));
    sum += w.w_size_3d * (laplace_nll_term(o.width) + laplace_nll_term(o.length) +
                          laplace_nll_term(o.height));
    sum += w.w_range * std::abs(o.range_pred - o.range_target);
    sum += w.w_orientation * std::abs(o.orientation_pred - o.orientation_target);
  }
  return sum / static_cast<double>(objects.size());
}

double loss_miscal(const MiscalTerm& t, double w_miscal) {
  const LaplacianTerm roll{t.pred.roll_deg, t.target.roll_deg, t.b_roll};
  const LaplacianTerm pitch{t.pred.pitch_deg, t.target.pitch_deg, t.b_pitch};
  const LaplacianTerm yaw{t.pred.yaw_deg, t.target.yaw_deg, t.b_yaw};
  return w_miscal *
         (laplace_nll_term(roll) + laplace_nll_term(pitch) + laplace_nll_term(yaw));
}

LossBreakdown total_loss(const LossSample& sample, const FocalParams& params,
                         const MultiTaskWeights& w) {
  LossBreakdown b;
  b.class_loss = focal_loss(sample.class_probs, params, w.w_class);
  b.two_d = loss_2d(sample.objects_2d, w);
  b.three_d = loss_3d(sample.objects_3d, w);
  b.miscal = loss_miscal(sample.miscal, w.w_miscal);
  b.total = b.class_loss + b.two_d + b.three_d + b.miscal;
  return b;
}

LossGradients analytic_gradients(const LossSample& sample, const FocalParams& params,
                                 const MultiTaskWeights& w) {
  LossGradients g;

  const double n_px = static_cast<double>(sample.class_probs.size());
  g.d_class_probs.reserve(sample.class_probs.size());
  for (double p : sample.class_probs) {
    if (!(p > 0.0) || p > 1.0) {
      throw DomainError("analytic_gradients: probability outside (0, 1]");
    }
    double d;
    if (p == 1.0) {
      // limit of -gamma (1-p)^(gamma-1) log p + (1-p)^gamma / p
      d = params.gamma == 0.0 ? 1.0 : 0.0;
    } else {
      d = -params.gamma * std::pow(1.0 - p, params.gamma - 1.0) * std::log(p) +
          std::pow(1.0 - p, params.gamma) / p;
    }
    g.d_class_probs.push_back(-w.w_class / n_px * params.alpha * d);
  }

  const double n2 = static_cast<double>(sample.objects_2d.size());
  g.objects_2d.reserve(sample.objects_2d.size());
  for (const Object2d& o : sample.objects_2d) {
    Object2dGrad og;
    og.offset_x = laplace_grad(o.offset_x, w.w_offset_2d / n2, g.subgradient_ambiguity);
    og.offset_y = laplace_grad(o.offset_y, w.w_offset_2d / n2, g.subgradient_ambiguity);
    og.width = laplace_grad(o.width, w.w_size_2d / n2, g.subgradient_ambiguity);
    og.height = laplace_grad(o.height, w.w_size_2d / n2, g.subgradient_ambiguity);
    g.objects_2d.push_back(og);
  }

  const double n3 = static_cast<double>(sample.objects_3d.size());
  g.objects_3d.reserve(sample.objects_3d.size());
  for (const Object3d& o : sample.objects_3d) {
    Object3dGrad og;
    og.offset_x = laplace_grad(o.offset_x, w.w_offset_3d / n3, g.subgradient_ambiguity);
    og.offset_y = laplace_grad(o.offset_y, w.w_offset_3d / n3, g.subgradient_ambiguity);
    og.width = laplace_grad(o.width, w.w_size_3d / n3, g.subgradient_ambiguity);
    og.length = laplace_grad(o.length, w.w_size_3d / n3, g.subgradient_ambiguity);
    og.height = laplace_grad(o.height, w.w_size_3d / n3, g.subgradient_ambiguity);
    const double rr = o.range_pred - o.range_target;
    const double ro = o.orientation_pred - o.orientation_target;
    if (rr == 0.0 || ro == 0.0) g.subgradient_ambiguity = true;
    og.d_range_pred = w.w_range / n3 * sign0(rr);
    og.d_orientation_pred = w.w_orientation / n3 * sign0(ro);
    g.objects_3d.push_back(og);
  }

  const MiscalTerm& t = sample.miscal;
  const LaplacianTerm axes[3] = {{t.pred.roll_deg, t.target.roll_deg, t.b_roll},
                                 {t.pred.pitch_deg, t.target.pitch_deg, t.b_pitch},
                                 {t.pred.yaw_deg, t.target.yaw_deg, t.b_yaw}};
  for (int a = 0; a < 3; ++a) {
    const LaplacianTermGrad lg = laplace_grad(axes[a], w.w_miscal, g.subgradient_ambiguity);
    g.miscal.d_pred[a] = lg.d_prediction;
    g.miscal.d_b[a] = lg.d_diversity_b;
  }
  return g;
}

}  // namespace miscal
