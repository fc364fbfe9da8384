#include <Eigen/Geometry>
#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "obkit/geometry.hpp"

namespace obkit::geom {

SceneMesh SceneMesh::build(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles,
                           std::vector<int> instance_ids) {
  if (instance_ids.size() != triangles.size()) {
    throw Error(ErrorCode::InvalidArgument, "one instance id per triangle required");
  }
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (const auto v : triangles[t]) {
      if (v >= vertices.size()) {
        throw Error(ErrorCode::InvalidArgument, "vertex index out of range in triangle " + std::to_string(t));
      }
    }
    const Vec3& a = vertices[triangles[t][0]];
    const Vec3& b = vertices[triangles[t][1]];
    const Vec3& c = vertices[triangles[t][2]];
    if (!((b - a).cross(c - a).norm() > 0.0)) {
      throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " has zero area");
    }
  }

  SceneMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.instance_ids_ = std::move(instance_ids);

  // Weld by exact position so duplicated vertices still produce adjacency.
  std::map<std::tuple<double, double, double>, std::uint32_t> canonical;
  std::vector<std::uint32_t> weld(mesh.vertices_.size());
  for (std::size_t i = 0; i < mesh.vertices_.size(); ++i) {
    const Vec3& v = mesh.vertices_[i];
    weld[i] = canonical.try_emplace({v.x(), v.y(), v.z()}, static_cast<std::uint32_t>(i)).first->second;
  }

  // Edges shared by exactly two triangles pair up directly; non-manifold
  // edges pair consecutive triangles in index order so adjacency stays symmetric.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<std::int32_t, int>>> edges;
  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = weld[mesh.triangles_[t][k]], b = weld[mesh.triangles_[t][(k + 1) % 3]];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back({static_cast<std::int32_t>(t), k});
    }
  }
  mesh.adjacency_.assign(mesh.triangles_.size(), {-1, -1, -1});
  for (const auto& [key, users] : edges) {
    for (std::size_t i = 0; i + 1 < users.size(); i += 2) {
      const auto [t0, k0] = users[i];
      const auto [t1, k1] = users[i + 1];
      if (t0 == t1) continue;
      mesh.adjacency_[t0][k0] = t1;
      mesh.adjacency_[t1][k1] = t0;
    }
  }

  mesh.centroids_.reserve(mesh.triangles_.size());
  Eigen::AlignedBox3d box;
  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    Vec3 c = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      c += mesh.vertex(t, k);
      box.extend(mesh.vertex(t, k));
    }
    mesh.centroids_.push_back(c / 3.0);
  }
  mesh.diameter_ = mesh.triangles_.empty() ? 0.0 : box.diagonal().norm();
  return mesh;
}

}  // namespace obkit::geom
