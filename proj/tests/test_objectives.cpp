#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "miscal/objectives.hpp"
#include "miscal/rng.hpp"

using namespace miscal;

namespace {

LaplacianTerm random_term(Rng& rng) {
  const double target = rng.uniform(-2.0, 2.0);
  double residual = rng.uniform(0.1, 2.0);
  if (rng.uniform() < 0.5) residual = -residual;  // keep |r| >= 0.1, away from the kink
  // keep b away from |r|, where the b-gradient is stationary and a relative
  // finite-difference comparison is ill-posed
  double b = rng.uniform(0.2, 2.0);
  while (std::abs(b - std::abs(residual)) < 0.1) b = rng.uniform(0.2, 2.0);
  return {target + residual, target, b};
}

LossSample random_sample(Rng& rng, int n_px = 6, int n2 = 3, int n3 = 2) {
  LossSample s;
  for (int i = 0; i < n_px; ++i) s.class_probs.push_back(rng.uniform(0.05, 0.95));
  for (int i = 0; i < n2; ++i) {
    s.objects_2d.push_back(
        {random_term(rng), random_term(rng), random_term(rng), random_term(rng)});
  }
  for (int i = 0; i < n3; ++i) {
    Object3d o{random_term(rng), random_term(rng), random_term(rng), random_term(rng),
               random_term(rng)};
    o.range_target = rng.uniform(50.0, 400.0);
    o.range_pred = o.range_target + (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.5, 5.0);
    o.orientation_target = rng.uniform(-1.5, 1.5);
    o.orientation_pred =
        o.orientation_target + (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.1, 0.5);
    s.objects_3d.push_back(o);
  }
  s.miscal.target = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  s.miscal.pred = {s.miscal.target.roll_deg + rng.uniform(0.1, 0.5),
                   s.miscal.target.pitch_deg - rng.uniform(0.1, 0.5),
                   s.miscal.target.yaw_deg + rng.uniform(0.1, 0.5)};
  const Eigen::Vector3d res =
      (s.miscal.pred.degrees() - s.miscal.target.degrees()).cwiseAbs();
  double* bs[3] = {&s.miscal.b_roll, &s.miscal.b_pitch, &s.miscal.b_yaw};
  for (int a = 0; a < 3; ++a) {
    double b = rng.uniform(0.2, 2.0);
    while (std::abs(b - res(a)) < 0.1) b = rng.uniform(0.2, 2.0);
    *bs[a] = b;
  }
  return s;
}

/// Pointers to every differentiated scalar of a sample, in a fixed order.
std::vector<double*> variables(LossSample& s) {
  std::vector<double*> v;
  for (double& p : s.class_probs) v.push_back(&p);
  for (Object2d& o : s.objects_2d) {
    for (LaplacianTerm* t : {&o.offset_x, &o.offset_y, &o.width, &o.height}) {
      v.push_back(&t->prediction);
      v.push_back(&t->diversity_b);
    }
  }
  for (Object3d& o : s.objects_3d) {
    for (LaplacianTerm* t : {&o.offset_x, &o.offset_y, &o.width, &o.length, &o.height}) {
      v.push_back(&t->prediction);
      v.push_back(&t->diversity_b);
    }
    v.push_back(&o.range_pred);
    v.push_back(&o.orientation_pred);
  }
  v.push_back(&s.miscal.pred.roll_deg);
  v.push_back(&s.miscal.pred.pitch_deg);
  v.push_back(&s.miscal.pred.yaw_deg);
  v.push_back(&s.miscal.b_roll);
  v.push_back(&s.miscal.b_pitch);
  v.push_back(&s.miscal.b_yaw);
  return v;
}

/// The analytic gradients flattened in the same order as variables().
std::vector<double> flat_gradients(const LossGradients& g) {
  std::vector<double> v(g.d_class_probs.begin(), g.d_class_probs.end());
  for (const Object2dGrad& o : g.objects_2d) {
    for (const LaplacianTermGrad* t : {&o.offset_x, &o.offset_y, &o.width, &o.height}) {
      v.push_back(t->d_prediction);
      v.push_back(t->d_diversity_b);
    }
  }
  for (const Object3dGrad& o : g.objects_3d) {
    for (const LaplacianTermGrad* t :
         {&o.offset_x, &o.offset_y, &o.width, &o.length, &o.height}) {
      v.push_back(t->d_prediction);
      v.push_back(t->d_diversity_b);
    }
    v.push_back(o.d_range_pred);
    v.push_back(o.d_orientation_pred);
  }
  for (int a = 0; a < 3; ++a) v.push_back(g.miscal.d_pred[a]);
  for (int a = 0; a < 3; ++a) v.push_back(g.miscal.d_b[a]);
  return v;
}

}  // namespace

TEST_CASE("focal loss") {
  const FocalParams params{0.25, 2.0};

  CHECK(focal_loss({1.0, 1.0, 1.0}, params, 2.0) == 0.0);

  // single pixel, p = 0.5, alpha 0.25, gamma 2, unit weight
  CHECK(focal_loss({0.5}, params, 1.0) ==
        doctest::Approx(0.25 * 0.25 * std::log(2.0)).epsilon(1e-12));
  CHECK(focal_loss({0.5}, params, 1.0) == doctest::Approx(0.043322).epsilon(1e-4));

  CHECK_THROWS_AS(focal_loss({0.0}, params, 1.0), DomainError);
  CHECK_THROWS_AS(focal_loss({-0.5}, params, 1.0), DomainError);
  CHECK_THROWS_AS(focal_loss({1.5}, params, 1.0), DomainError);
}

TEST_CASE("focal loss at gamma 0 is the mean cross entropy") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> probs;
    double ce = 0.0;
    for (int i = 0; i < 8; ++i) {
      probs.push_back(rng.uniform(0.05, 1.0));
      ce -= std::log(probs.back());
    }
    ce /= static_cast<double>(probs.size());
    CHECK(focal_loss(probs, {1.0, 0.0}, 1.0) == doctest::Approx(ce).epsilon(1e-12));
  }
}

TEST_CASE("laplace term") {
  CHECK(laplace_nll_term({1.0, 1.0, 1.0}) == 0.0);
  CHECK(laplace_nll_term({0.0, 1.0, 0.5}) ==
        doctest::Approx(2.0 + std::log(0.5)).epsilon(1e-12));
  CHECK(laplace_nll_term({0.0, 1.0, 0.5}) == doctest::Approx(1.306853).epsilon(1e-5));
  CHECK_THROWS_AS(laplace_nll_term({0, 0, 0}), DomainError);
  CHECK_THROWS_AS(laplace_nll_term({0, 0, -1}), DomainError);
}

TEST_CASE("the diversity minimizer is the residual magnitude") {
  for (double r : {0.3, 1.0, 2.5}) {
    const double at_r = laplace_nll_term({r, 0.0, r});
    double best_b = 0.0, best_v = 1e300;
    for (double b = 0.02; b <= 8.0; b += 0.002) {  // 1-D scan oracle
      const double v = laplace_nll_term({r, 0.0, b});
      if (v < best_v) {
        best_v = v;
        best_b = b;
      }
      CHECK(at_r <= v + 1e-12);
    }
    CHECK(best_b == doctest::Approx(r).epsilon(0.01));
    CHECK(at_r == doctest::Approx(1.0 + std::log(r)).epsilon(1e-12));
  }
}

TEST_CASE("2D loss arithmetic") {
  const MultiTaskWeights w;  // W_o = 1.0, W_s = 0.1

  Object2d exact;  // all predictions exact, all b = 1
  CHECK(loss_2d({exact}, w) == 0.0);

  Object2d one;
  one.offset_x = {1.0, 0.0, 1.0};
  one.offset_y = {1.0, 0.0, 1.0};
  // sizes exact with b = 1
  CHECK(loss_2d({one}, w) == doctest::Approx(2.0).epsilon(1e-12));

  Object2d sized;
  sized.width = {2.0, 1.0, 1.0};
  sized.height = {3.0, 1.0, 1.0};
  MultiTaskWeights doubled = w;
  doubled.w_size_2d *= 2.0;
  const double size_part = loss_2d({sized}, w) - loss_2d({exact}, w);
  CHECK(loss_2d({sized}, doubled) - loss_2d({exact}, doubled) ==
        doctest::Approx(2.0 * size_part).epsilon(1e-12));
}

TEST_CASE("3D loss arithmetic") {
  const MultiTaskWeights w;

  Object3d exact;
  CHECK(loss_3d({exact}, w) == 0.0);

  Object3d one;
  one.offset_x = {0.5, 0.0, 1.0};   // W_o-hat 0.25 -> 0.125
  one.range_pred = 2.0;             // W_d 1.5 -> 3.0
  one.orientation_pred = 0.5;       // W_phi 0.1 -> 0.05
  CHECK(loss_3d({one}, w) == doctest::Approx(0.25 * 0.5 + 1.5 * 2.0 + 0.1 * 0.5));

  MultiTaskWeights doubled = w;
  doubled.w_range *= 2.0;
  CHECK(loss_3d({one}, doubled) - loss_3d({one}, w) == doctest::Approx(1.5 * 2.0));
}

TEST_CASE("misalignment loss arithmetic") {
  MiscalTerm t;
  CHECK(loss_miscal(t, 0.4) == 0.0);

  t.pred = {0.1, 0.2, 0.3};
  t.target = {0.0, 0.0, 0.0};
  CHECK(loss_miscal(t, 0.4) == doctest::Approx(0.4 * 0.6).epsilon(1e-12));
  CHECK(loss_miscal(t, 0.4) == doctest::Approx(0.24).epsilon(1e-12));

  // per-axis diversity minimizer equals the per-axis residual
  MiscalTerm scan = t;
  double best_b = 0.0, best_v = 1e300;
  for (double b = 0.01; b <= 2.0; b += 0.001) {
    scan.b_pitch = b;
    const double v = loss_miscal(scan, 0.4);
    if (v < best_v) {
      best_v = v;
      best_b = b;
    }
  }
  CHECK(best_b == doctest::Approx(0.2).epsilon(0.01));
}

TEST_CASE("total loss is the sum of its parts") {
  Rng rng(2);
  const FocalParams params;
  const MultiTaskWeights w;
  for (int t = 0; t < 20; ++t) {
    LossSample s = random_sample(rng);
    const LossBreakdown b = total_loss(s, params, w);
    CHECK(b.total ==
          doctest::Approx(b.class_loss + b.two_d + b.three_d + b.miscal).epsilon(1e-12));

    // dropping the misalignment term equals zeroing its weight
    MultiTaskWeights no_miscal = w;
    no_miscal.w_miscal = 0.0;
    CHECK(total_loss(s, params, no_miscal).total ==
          doctest::Approx(b.total - b.miscal).epsilon(1e-12));
  }

  LossSample zero;
  zero.class_probs = {1.0, 1.0};
  zero.objects_2d.push_back({});
  zero.objects_3d.push_back({});
  CHECK(total_loss(zero, params, w).total == 0.0);
}

TEST_CASE("default multi-task weights") {
  const MultiTaskWeights w;
  CHECK(w.w_offset_2d == 1.0);
  CHECK(w.w_class == 2.0);
  CHECK(w.w_size_2d == 0.1);
  CHECK(w.w_offset_3d == 0.25);
  CHECK(w.w_size_3d == 1.0);
  CHECK(w.w_range == 1.5);
  CHECK(w.w_orientation == 0.1);
  CHECK(w.w_miscal == 0.4);
}

TEST_CASE("losses are bounded below by their b-profiled minimum") {
  // minimizing each Laplacian term over b gives 1 + log |r|
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const LaplacianTerm term = random_term(rng);
    const double r = std::abs(term.prediction - term.target);
    CHECK(laplace_nll_term(term) >= 1.0 + std::log(r) - 1e-12);
  }
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(4);
  const FocalParams params;
  const MultiTaskWeights w;
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    LossSample s = random_sample(rng);
    const LossGradients g = analytic_gradients(s, params, w);
    CHECK_FALSE(g.subgradient_ambiguity);
    const std::vector<double> analytic = flat_gradients(g);
    std::vector<double*> vars = variables(s);
    REQUIRE(analytic.size() == vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
      const double saved = *vars[i];
      *vars[i] = saved + h;
      const double up = total_loss(s, params, w).total;
      *vars[i] = saved - h;
      const double down = total_loss(s, params, w).total;
      *vars[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
      CHECK(std::abs(analytic[i] - fd) / scale <= 1e-5);
    }
  }
}

TEST_CASE("gradient stationarity in b at the residual") {
  LossSample s;
  s.miscal.pred = {0.5, 0.0, 0.0};
  s.miscal.target = {0.2, 0.0, 0.0};
  s.miscal.b_roll = 0.3;  // equals |residual|
  s.miscal.b_pitch = 1.0;
  s.miscal.b_yaw = 1.0;
  const LossGradients g = analytic_gradients(s, {}, {});
  CHECK(std::abs(g.miscal.d_b[0]) <= 1e-12);
}

TEST_CASE("focal gradient closed forms") {
  const MultiTaskWeights w1{.w_class = 1.0};
  // gamma = 0: d/dp = -alpha / p
  LossSample s;
  s.class_probs = {0.25};
  const LossGradients g0 = analytic_gradients(s, {1.0, 0.0}, w1);
  CHECK(g0.d_class_probs[0] == doctest::Approx(-1.0 / 0.25).epsilon(1e-12));

  // p -> 1 with gamma >= 1: the gradient vanishes
  s.class_probs = {1.0};
  const LossGradients g1 = analytic_gradients(s, {0.25, 2.0}, w1);
  CHECK(g1.d_class_probs[0] == 0.0);
}

TEST_CASE("zero residuals raise the ambiguity flag") {
  LossSample s;
  s.miscal.pred = s.miscal.target = {0.1, 0.2, 0.3};
  const LossGradients g = analytic_gradients(s, {}, {});
  CHECK(g.subgradient_ambiguity);
  CHECK(g.miscal.d_pred[0] == 0.0);  // minimum-norm subgradient
}
