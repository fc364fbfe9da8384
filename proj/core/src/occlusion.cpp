#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "obkit/obgen.hpp"

namespace obkit::gen {
namespace {

geom::Vec3 closest_on_segment(const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& p) {
  const geom::Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return a + t * ab;
}

// Hop-limited walk over edge adjacency from p's triangle to q's. The path
// runs on the surface: from p.point across each shared edge at the edge
// point nearest q.point, then to q.point. `max_triangles` counts both ends.
bool walk_connects(const geom::SceneMesh& mesh, const geom::Hit& p, const geom::Hit& q, int max_triangles,
                   double budget) {
  if (max_triangles <= 0) return false;
  if (p.triangle == q.triangle) return true;
  struct State {
    int tri;
    geom::Vec3 at;
    double dist;
  };
  std::unordered_map<int, double> best{{p.triangle, 0.0}};
  std::vector<State> frontier{{p.triangle, p.point, 0.0}};
  for (int hop = 1; hop < max_triangles && !frontier.empty(); ++hop) {
    std::vector<State> next;
    for (const State& s : frontier) {
      const auto& adj = mesh.adjacency(static_cast<std::size_t>(s.tri));
      for (int k = 0; k < 3; ++k) {
        const std::int32_t nb = adj[k];
        if (nb < 0) continue;
        const geom::Vec3 cross = closest_on_segment(mesh.vertex(s.tri, k), mesh.vertex(s.tri, (k + 1) % 3), q.point);
        const double d = s.dist + (cross - s.at).norm();
        // The rest of the path is at least the straight line to q.
        if (d + (q.point - cross).norm() > budget) continue;
        if (nb == q.triangle) return true;
        auto it = best.find(nb);
        if (it != best.end() && it->second <= d) continue;
        best[nb] = d;
        next.push_back({nb, cross, d});
      }
    }
    frontier = std::move(next);
  }
  return false;
}

// Strict order deciding which side is nearer to the camera.
bool nearer(const geom::Hit& a, const geom::Hit& b) {
  if (a.depth != b.depth) return a.depth < b.depth;
  if (a.triangle != b.triangle) return a.triangle < b.triangle;
  return std::lexicographical_compare(a.point.data(), a.point.data() + 3, b.point.data(), b.point.data() + 3);
}

}  // namespace

void GenConfig::validate() const {
  if (!(gap_factor > 1.0)) throw Error(ErrorCode::InvalidArgument, "gap factor must exceed 1");
  if (adjacency_walk_limit < 0) throw Error(ErrorCode::InvalidArgument, "adjacency walk limit must be >= 0");
  if (!(contact_tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "contact tolerance must be >= 0");
  if (supersample != 1 && supersample != 2) throw Error(ErrorCode::InvalidArgument, "supersample must be 1 or 2");
}

double footprint(const geom::PinholeCamera& cam, const geom::Hit& hit, bool horizontal) {
  const geom::Vec3 view = (hit.point - cam.center()).normalized();
  const double cos_incidence = std::abs(hit.normal.dot(view));
  const double angular = 1.0 / (horizontal ? cam.fx : cam.fy);
  return hit.depth * angular / std::max(cos_incidence, 0.2);
}

OcclusionVerdict occlusion_test(const geom::SceneMesh& mesh, const geom::Hit& p, const geom::Hit& q,
                                double fp, const GenConfig& cfg) {
  const double gap = (p.point - q.point).norm();
  if (gap <= cfg.gap_factor * fp) return {VerdictKind::continuous, OccluderSide::none};
  // Walked both ways so the verdict does not depend on argument order.
  if (walk_connects(mesh, p, q, cfg.adjacency_walk_limit, 2.0 * gap) ||
      walk_connects(mesh, q, p, cfg.adjacency_walk_limit, 2.0 * gap)) {
    return {VerdictKind::continuous, OccluderSide::none};
  }
  const bool same_object = p.instance == q.instance;
  if (!same_object && gap <= cfg.contact_tolerance * fp) return {VerdictKind::contact, OccluderSide::none};
  return {same_object ? VerdictKind::self_occlusion : VerdictKind::inter_object_occlusion,
          nearer(p, q) ? OccluderSide::first_pixel : OccluderSide::second_pixel};
}

}  // namespace obkit::gen
