#include "miscal/io.hpp"

#include <json.hpp>

#include <fstream>

#include "miscal/errors.hpp"

namespace miscal {

using nlohmann::json;

std::string scene_to_json_text(const SyntheticScene& scene) {
  json points = json::array();
  for (const Point3& p : scene.points) {
    points.push_back(json::array({p.x(), p.y(), p.z()}));
  }
  json boxes = json::array();
  for (const SceneBox& sb : scene.boxes) {
    boxes.push_back({{"cx", sb.box.cx},
                     {"cy", sb.box.cy},
                     {"length", sb.box.length},
                     {"width", sb.box.width},
                     {"yaw", sb.box.yaw},
                     {"bucket", sb.bucket_index}});
  }
  json rotation = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      rotation.push_back(scene.truth_extrinsics.rotation(r, col));
    }
  }
  const json j{{"points_camera_frame", points},
               {"boxes", boxes},
               {"truth_extrinsics",
                {{"rotation_row_major", rotation},
                 {"translation",
                  {scene.truth_extrinsics.translation.x(),
                   scene.truth_extrinsics.translation.y(),
                   scene.truth_extrinsics.translation.z()}}}}};
  return j.dump(1) + "\n";
}

std::string depth_image_to_json_text(const DepthImage& img) {
  json cells = json::array();
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const double depth = img.at(u, v);
      if (depth != 0.0) {
        cells.push_back(json::array({u, v, depth}));
      }
    }
  }
  const json j{{"width", img.width},
               {"height", img.height},
               {"no_return_value", 0.0},
               {"cells", cells}};
  return j.dump(1) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << content;
  if (!out.good()) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace miscal
