// JSON export of scenes and depth rasters for offline inspection.
#pragma once

#include <string>

#include "miscal/geometry.hpp"
#include "miscal/scene.hpp"

namespace miscal {

/// Scene as JSON: points, boxes with bucket tags, truth extrinsics.
std::string scene_to_json_text(const SyntheticScene& scene);

/// Sparse raster as JSON: dimensions plus [u, v, depth] triples for the
/// nonzero cells (zero cells carry no return and are omitted).
std::string depth_image_to_json_text(const DepthImage& img);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace miscal
