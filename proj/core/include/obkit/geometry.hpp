#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using TriangleIndices = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with an object label per triangle and symmetric
/// edge adjacency (-1 where an edge has no partner).
class SceneMesh {
 public:
  SceneMesh() = default;

  /// Validates indices and triangle areas (DegenerateTriangle on zero area)
  /// and derives edge adjacency. Vertices at identical positions are welded
  /// for adjacency purposes only.
  static SceneMesh build(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles,
                         std::vector<int> instance_ids);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  int instance(std::size_t tri) const { return instance_ids_[tri]; }
  /// Neighbor across edge k (vertices k and k+1), or -1.
  const std::array<std::int32_t, 3>& adjacency(std::size_t tri) const { return adjacency_[tri]; }
  const Vec3& centroid(std::size_t tri) const { return centroids_[tri]; }
  const Vec3& vertex(std::size_t tri, int k) const { return vertices_[triangles_[tri][k]]; }

  /// Bounding-box diagonal length.
  double diameter() const { return diameter_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::vector<int> instance_ids_;
  std::vector<std::array<std::int32_t, 3>> adjacency_;
  std::vector<Vec3> centroids_;
  double diameter_ = 0.0;
};

/// Ideal pinhole. Pose maps world to camera: X_cam = rotation * X_world + translation.
/// Camera frame: +x right, +y down, +z forward. Pixel (x, y) covers
/// [x, x+1) x [y, y+1) in image coordinates.
struct PinholeCamera {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Throws InvalidCamera on any invariant violation.
  void validate() const;

  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 direction_to_camera(const Vec3& world_dir) const { return rotation * world_dir; }
  Vec3 center() const { return -(rotation.transpose() * translation); }
  /// Image-plane coordinates of a world point, if it lies in front of the camera.
  std::optional<Eigen::Vector2d> project(const Vec3& world) const;
  Extent extent() const { return {width, height}; }
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length
};

/// World ray through image point (x + jitter_x, y + jitter_y).
Ray pixel_ray(const PinholeCamera& cam, int x, int y, Eigen::Vector2d jitter = {0.5, 0.5});

struct Hit {
  int triangle = -1;
  int instance = -1;
  Vec3 point = Vec3::Zero();
  double distance = 0.0;     // ray parameter; meters since directions are unit
  double depth = 0.0;        // camera-frame z once rendered; equals distance from cast_ray
  Vec3 normal = Vec3::Zero();  // world frame, unit, facing the ray origin
};

/// Median-split bounding-volume hierarchy over a SceneMesh. The mesh must
/// outlive the hierarchy.
class Bvh {
 public:
  explicit Bvh(const SceneMesh& mesh);

  const SceneMesh& mesh() const { return *mesh_; }
  std::optional<Hit> cast(const Ray& ray) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Eigen::Vector3d lo, hi;
    std::uint32_t first = 0;  // child index for inner nodes, primitive offset for leaves
    std::uint32_t count = 0;  // 0 for inner nodes
  };
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroid_of);

  const SceneMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// Nearest hit with watertight ray/triangle tests. Hits closer than
/// 1e-9 * mesh diameter to the minimum are treated as ties and resolved to
/// the lowest triangle index. Back faces are reported.
std::optional<Hit> cast_ray(const Bvh& accel, const Ray& ray);
/// Same contract, testing every triangle.
std::optional<Hit> cast_ray_brute(const SceneMesh& mesh, const Ray& ray);

class GBuffer {
 public:
  GBuffer() = default;
  explicit GBuffer(Extent e) : extent_(e), hits_(e.area()) {}

  Extent extent() const { return extent_; }
  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  const std::optional<Hit>& at(int x, int y) const { return hits_[index(x, y)]; }
  std::optional<Hit>& at(int x, int y) { return hits_[index(x, y)]; }

  /// Camera-frame z per pixel, 0 where nothing was hit.
  Raster<float> depth_map() const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x);
  }
  Extent extent_{};
  std::vector<std::optional<Hit>> hits_;
};

/// Per-pixel ray casting. supersample 1 uses the pixel-center ray;
/// supersample 2 casts a 2x2 stratified grid and keeps the nearest hit.
GBuffer render_gbuffer(const Bvh& accel, const PinholeCamera& cam, int supersample = 1,
                       unsigned jobs = 1);

}  // namespace obkit::geom
