#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "obkit/geometry.hpp"

namespace obkit::geom {

struct ObjMesh {
  SceneMesh mesh;
  std::vector<std::string> instance_names;  // index = instance id
  std::size_t dropped_degenerate = 0;
};

/// Wavefront subset: `v` and `f` records (polygons fan-triangulated, negative
/// indices allowed), `o`/`g` start a named object group. Instance ids follow
/// the order in which groups first receive a face. Zero-area faces are dropped
/// and counted. Other record types are ignored.
ObjMesh parse_obj(std::string_view text);

/// Scene description: `key = value` lines, `#` comments.
///
///   mesh        = path to the .obj file, relative to the description
///   width       = image width in pixels
///   height      = image height in pixels
///   fx, fy      = focal lengths in pixels
///   cx, cy      = principal point in pixels
///   rotation    = 9 numbers, row-major world-to-camera rotation (default identity)
///   translation = 3 numbers, world-to-camera translation in meters (default 0)
///   supersample = 1 or 2 (default 1)
struct SceneDescription {
  std::filesystem::path mesh_path;
  PinholeCamera camera;
  int supersample = 1;
};

SceneDescription parse_scene_description(std::string_view text, const std::filesystem::path& base_dir);
std::string format_scene_description(const SceneDescription& scene);

struct LoadedScene {
  ObjMesh geometry;
  PinholeCamera camera;
  int supersample = 1;
};

/// Reads a description file and its mesh; the camera is validated.
LoadedScene load_scene(const std::filesystem::path& description);

}  // namespace obkit::geom
