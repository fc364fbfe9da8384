#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "obkit/geometry.hpp"
#include "obkit/obgen.hpp"
#include "obkit/raster.hpp"
#include "obkit/rng.hpp"

namespace obkit::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Accumulates triangles; every quad is split along its a-c diagonal.
struct MeshBuilder {
  std::vector<geom::Vec3> vertices;
  std::vector<geom::TriangleIndices> triangles;
  std::vector<int> instances;

  std::uint32_t vertex(const geom::Vec3& v);
  void triangle(const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& c, int instance);
  void quad(const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& c, const geom::Vec3& d, int instance);
  // Axis-aligned box, then rotated about its center by `yaw` (around y) and `pitch` (around x).
  void box(const geom::Vec3& center, const geom::Vec3& half, double yaw, double pitch, int instance);
  geom::SceneMesh build() const;
  std::string to_obj() const;
};

geom::PinholeCamera camera(int width = 256, int height = 256, double focal = 256.0);

// A fronto-parallel quad [x0,x1]x[y0,y1] at depth z.
geom::SceneMesh fronto_quad(double x0, double x1, double y0, double y1, double z);
// Two coplanar quads sharing the edge x = 0, separate instances and vertices.
geom::SceneMesh abutting_quads();
// One-instance sheet at z = 2 with a flap hinged along y = 0.3 and lifted toward the camera.
geom::SceneMesh folded_sheet();

// Oracles.

// Pixels within Euclidean `radius` of any point, by direct distance tests.
BinaryMap brute_disk(const std::vector<Pixel>& points, double radius, Extent canvas);
// Maximum bipartite matching by Kuhn's augmenting paths.
std::size_t kuhn_matching(const BinaryMap& pred, const BinaryMap& gt, double d_max);
// Nearest hit over all triangles with a Moller-Trumbore test; returns the
// triangle and the minimum barycentric margin of the hit.
struct BruteHit {
  int triangle = -1;
  double t = 0.0;
  double margin = 0.0;
};
std::optional<BruteHit> moller_trumbore_nearest(const geom::SceneMesh& mesh, const geom::Ray& ray);
double distance_to_segment(double px, double py, double ax, double ay, double bx, double by);

// Random data.

// Thin map built from random 8-connected walks.
BinaryMap random_thin_map(Extent e, Rng& rng, int walks, int steps);
geom::SceneMesh random_triangle_soup(Rng& rng, int triangles);

// A generated scene with an image whose only edges are object outlines and
// bars painted at least `bar_clearance` pixels away from any boundary.
struct SyntheticSample {
  std::string id;
  RgbImage rgb;
  BinaryMap gt;
  gen::ObMap ob;
  Raster<float> depth;
};
SyntheticSample box_scene(std::uint64_t seed, int size = 256, double bar_clearance = 20.0);
// Writes images/<id>.png and gt/<id>.png under `dir`.
void write_samples(const std::vector<SyntheticSample>& samples, const std::filesystem::path& dir);

}  // namespace obkit::testing
