#include <doctest.h>
#include <json.hpp>

#include <cmath>

#include "miscal/io.hpp"
#include "miscal/scene.hpp"

using namespace miscal;

TEST_CASE("degenerate scene configs are rejected") {
  SceneConfig cfg;
  cfg.n_points = 0;
  Rng rng(1);
  CHECK_THROWS_AS(generate_scene(cfg, rng), ConfigError);

  SceneConfig bad_range;
  bad_range.range_min_m = 500;
  bad_range.range_max_m = 200;
  CHECK_THROWS_AS(bad_range.validate(), ConfigError);

  SceneConfig overlapping;
  overlapping.buckets = {{200, 350}, {300, 400}};
  CHECK_THROWS_AS(overlapping.validate(), ConfigError);
}

TEST_CASE("scene generation replays exactly for a seed") {
  SceneConfig cfg;
  cfg.n_points = 200;
  cfg.seed = 42;
  Rng r1(42);
  const SyntheticScene a = generate_scene(cfg, r1);
  const SyntheticScene b = generate_scene(cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK((a.points[i] - b.points[i]).norm() == 0.0);
  }
  REQUIRE(a.boxes.size() == b.boxes.size());
  for (size_t i = 0; i < a.boxes.size(); ++i) {
    CHECK(a.boxes[i].box.cx == b.boxes[i].box.cx);
    CHECK(a.boxes[i].box.yaw == b.boxes[i].box.yaw);
  }
}

TEST_CASE("every generated point reprojects inside the image") {
  SceneConfig cfg;
  cfg.n_points = 10000;
  Rng rng(43);
  const SyntheticScene scene = generate_scene(cfg, rng);
  const CameraIntrinsics k = CameraIntrinsics::reference();
  for (const Point3& p : scene.points) {
    CHECK(p.z() >= cfg.range_min_m);
    CHECK(p.z() <= cfg.range_max_m);
    const auto [px, depth] = project(p, k);
    CHECK(px.u >= 0.0);
    CHECK(px.u < k.width);
    CHECK(px.v >= 0.0);
    CHECK(px.v < k.height);
  }
}

TEST_CASE("box centroids respect their bucket bounds") {
  SceneConfig cfg;
  Rng rng(44);
  const SyntheticScene scene = generate_scene(cfg, rng);
  CHECK(scene.boxes.size() ==
        cfg.buckets.size() * static_cast<size_t>(cfg.n_boxes_per_bucket));
  for (const SceneBox& sb : scene.boxes) {
    const RangeBucket& bucket = cfg.buckets[static_cast<size_t>(sb.bucket_index)];
    CHECK(sb.box.range() >= bucket.min_m);
    CHECK(sb.box.range() < bucket.max_m);
    CHECK(sb.box.length >= 4.0);
    CHECK(sb.box.length <= 16.0);
    CHECK(sb.box.width >= 2.0);
    CHECK(sb.box.width <= 3.0);
  }
}

TEST_CASE("correspondences with no fault and no noise are identities") {
  SceneConfig cfg;
  cfg.n_points = 100;
  Rng rng(45);
  const SyntheticScene scene = generate_scene(cfg, rng);
  const CameraIntrinsics k = CameraIntrinsics::reference();
  Rng noise_rng(46);
  const auto cs = make_correspondences(scene, k, {0, 0, 0}, 0.0, noise_rng);
  REQUIRE(cs.size() == scene.points.size());
  for (const Correspondence& c : cs) {
    CHECK(c.target.x == doctest::Approx(c.source.x).epsilon(1e-14));
    CHECK(c.target.y == doctest::Approx(c.source.y).epsilon(1e-14));
    CHECK(c.source.z == 1.0);
    CHECK(c.target.z == 1.0);
  }
}

TEST_CASE("a 1 degree pan shifts the central pixel by fx tan(1 deg)") {
  SyntheticScene scene;
  scene.points = {{0, 0, 300}, {10, 5, 300}, {-8, 4, 280}, {20, -10, 400}};
  const CameraIntrinsics k = CameraIntrinsics::reference();
  Rng rng(47);
  const auto cs = make_correspondences(scene, k, {0, 1.0, 0}, 0.0, rng);
  REQUIRE(cs.size() == 4);
  const double shift_px = (cs[0].target.x - cs[0].source.x) * k.fx;
  CHECK(shift_px == doctest::Approx(k.fx * std::tan(deg2rad(1.0))).epsilon(1e-9));
  CHECK(shift_px == doctest::Approx(125.07).epsilon(1e-3));
}

TEST_CASE("noiseless correspondences satisfy the exact homography") {
  SceneConfig cfg;
  cfg.n_points = 300;
  Rng rng(48);
  const SyntheticScene scene = generate_scene(cfg, rng);
  const CameraIntrinsics k = CameraIntrinsics::reference();
  const EulerMisalignment dr{0.4, -0.7, 0.9};
  Rng noise_rng(49);
  const auto cs = make_correspondences(scene, k, dr, 0.0, noise_rng);
  const RotationMatrix r = rotation_from_misalignment(dr);
  for (const Correspondence& c : cs) {
    const Eigen::Vector3d mapped = r * Eigen::Vector3d(c.source.x, c.source.y, c.source.z);
    const Eigen::Vector3d target(c.target.x, c.target.y, c.target.z);
    CHECK(mapped.cross(target).norm() <= 1e-9);
  }
}

TEST_CASE("pixel noise is unbiased in normalized coordinates") {
  SceneConfig cfg;
  cfg.n_points = 10000;
  Rng rng(50);
  const SyntheticScene scene = generate_scene(cfg, rng);
  const CameraIntrinsics k = CameraIntrinsics::reference();
  Rng noise_rng(51);
  const auto cs = make_correspondences(scene, k, {0, 0, 0}, 2.0, noise_rng);
  REQUIRE(cs.size() > 9000);
  double dx = 0.0, dy = 0.0;
  for (const Correspondence& c : cs) {
    dx += c.target.x - c.source.x;
    dy += c.target.y - c.source.y;
  }
  dx /= static_cast<double>(cs.size());
  dy /= static_cast<double>(cs.size());
  const double bound = 3.0 * (2.0 / k.fx) / std::sqrt(static_cast<double>(cs.size()));
  CHECK(std::abs(dx) <= bound);
  CHECK(std::abs(dy) <= bound);
}

TEST_CASE("dropped pairs do not disturb the survivors") {
  SyntheticScene scene;
  // two points that survive a small pan, one hugging the left edge that will not
  const CameraIntrinsics k = CameraIntrinsics::reference();
  const double zl = 300.0;
  const double x_edge = (0.5 - k.cx) / k.fx * zl;
  scene.points = {{0, 0, 300}, {5, 2, 350}, {x_edge, 0, zl}, {-3, 1, 250}};
  Rng rng(52);
  const auto with_all = make_correspondences(scene, k, {0, -0.5, 0}, 0.0, rng);
  CHECK(with_all.size() == 3);  // the edge point leaves the frame

  SyntheticScene survivors_only;
  survivors_only.points = {{0, 0, 300}, {5, 2, 350}, {-3, 1, 250}};
  Rng rng2(53);
  const auto direct = make_correspondences(survivors_only, k, {0, -0.5, 0}, 0.0, rng2);
  REQUIRE(direct.size() == with_all.size());
  for (size_t i = 0; i < direct.size(); ++i) {
    CHECK(direct[i].target.x == with_all[i].target.x);
    CHECK(direct[i].target.y == with_all[i].target.y);
  }
}

TEST_CASE("scene and depth-raster JSON exports") {
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.n_boxes_per_bucket = 2;
  cfg.seed = 55;
  const SyntheticScene scene = generate_scene(cfg);

  const nlohmann::json sj = nlohmann::json::parse(scene_to_json_text(scene));
  CHECK(sj.at("points_camera_frame").size() == 50);
  CHECK(sj.at("boxes").size() == scene.boxes.size());
  CHECK(sj.at("boxes")[0].contains("bucket"));
  CHECK(sj.at("truth_extrinsics").at("rotation_row_major").size() == 9);

  const DepthImage img =
      render_depth_image(scene.points, RigidTransform{}, CameraIntrinsics::reference());
  const nlohmann::json dj = nlohmann::json::parse(depth_image_to_json_text(img));
  CHECK(dj.at("width") == img.width);
  CHECK(dj.at("cells").size() == static_cast<size_t>(img.count_nonzero()));
  for (const auto& cell : dj.at("cells")) {
    CHECK(cell.at(2).get<double>() > 0.0);
  }
}

TEST_CASE("too few survivors raises DegenerateScene") {
  SyntheticScene scene;
  const CameraIntrinsics k = CameraIntrinsics::reference();
  // all three points on the left edge; a leftward pan pushes them out
  const double z = 300.0;
  const double x_edge = (1.0 - k.cx) / k.fx * z;
  scene.points = {{x_edge, 0, z}, {x_edge, 1, z}, {x_edge, -1, z}};
  Rng rng(54);
  CHECK_THROWS_AS(make_correspondences(scene, k, {0, -1.0, 0}, 0.0, rng),
                  DegenerateScene);
}
