#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "obkit/geometry.hpp"

namespace obkit::geom {
namespace {

// Per-ray shear constants of the watertight test (Woop, Benthin, Wald).
struct ShearedRay {
  int kx, ky, kz;
  double sx, sy, sz;
  Vec3 origin, direction, inv_dir;

  explicit ShearedRay(const Ray& r) : origin(r.origin), direction(r.direction) {
    const Vec3 a = r.direction.cwiseAbs();
    kz = a.x() > a.y() ? (a.x() > a.z() ? 0 : 2) : (a.y() > a.z() ? 1 : 2);
    kx = (kz + 1) % 3;
    ky = (kx + 1) % 3;
    if (r.direction[kz] < 0.0) std::swap(kx, ky);
    sx = r.direction[kx] / r.direction[kz];
    sy = r.direction[ky] / r.direction[kz];
    sz = 1.0 / r.direction[kz];
    inv_dir = r.direction.cwiseInverse();
  }
};

// Returns the ray parameter of a hit, or a negative value for a miss.
double intersect(const ShearedRay& r, const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3 a = p0 - r.origin, b = p1 - r.origin, c = p2 - r.origin;
  const double ax = a[r.kx] - r.sx * a[r.kz], ay = a[r.ky] - r.sy * a[r.kz];
  const double bx = b[r.kx] - r.sx * b[r.kz], by = b[r.ky] - r.sy * b[r.kz];
  const double cx = c[r.kx] - r.sx * c[r.kz], cy = c[r.ky] - r.sy * c[r.kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    // Edge-exact case: redo the 2D edge functions in extended precision so
    // the sign decisions on shared edges agree between neighbors.
    using L = long double;
    u = static_cast<double>(L(cx) * L(by) - L(cy) * L(bx));
    v = static_cast<double>(L(ax) * L(cy) - L(ay) * L(cx));
    w = static_cast<double>(L(bx) * L(ay) - L(by) * L(ax));
  }
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return -1.0;
  const double det = u + v + w;
  if (det == 0.0) return -1.0;
  const double az = r.sz * a[r.kz], bz = r.sz * b[r.kz], cz = r.sz * c[r.kz];
  const double t = (u * az + v * bz + w * cz) / det;
  return t > 0.0 ? t : -1.0;
}

struct Candidate {
  double t;
  std::uint32_t tri;
};

class NearestCollector {
 public:
  explicit NearestCollector(double tie) : tie_(tie) {}

  void offer(double t, std::uint32_t tri) {
    if (t < 0.0) return;
    if (t < best_) best_ = t;
    if (t < best_ + tie_) candidates_.push_back({t, tri});
  }
  // Farthest parameter that can still matter.
  double horizon() const { return best_ + tie_; }

  std::optional<Candidate> result() const {
    std::optional<Candidate> out;
    for (const Candidate& c : candidates_) {
      if (!(c.t < best_ + tie_)) continue;
      if (!out || c.tri < out->tri) out = c;
    }
    return out;
  }

 private:
  double tie_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<Candidate> candidates_;
};

Hit make_hit(const SceneMesh& mesh, const Ray& ray, const Candidate& c) {
  Hit hit;
  hit.triangle = static_cast<int>(c.tri);
  hit.instance = mesh.instance(c.tri);
  hit.distance = c.t;
  hit.depth = c.t;
  hit.point = ray.origin + c.t * ray.direction;
  const Vec3 e1 = mesh.vertex(c.tri, 1) - mesh.vertex(c.tri, 0);
  const Vec3 e2 = mesh.vertex(c.tri, 2) - mesh.vertex(c.tri, 0);
  Vec3 n = e1.cross(e2).normalized();
  if (n.dot(ray.direction) > 0.0) n = -n;
  hit.normal = n;
  return hit;
}

double tie_tolerance(const SceneMesh& mesh) { return 1e-9 * mesh.diameter(); }

// Slab test; the far bound is widened by a few ulps so a box never rejects
// a triangle hit that lies exactly on its face.
bool box_entry(const Vec3& lo, const Vec3& hi, const ShearedRay& r, double horizon, double& entry) {
  double t0 = 0.0, t1 = horizon;
  for (int k = 0; k < 3; ++k) {
    double near = (lo[k] - r.origin[k]) * r.inv_dir[k];
    double far = (hi[k] - r.origin[k]) * r.inv_dir[k];
    if (near > far) std::swap(near, far);
    if (std::isnan(near) || std::isnan(far)) {
      // Direction component is zero and the origin lies on a slab plane.
      if (r.origin[k] < lo[k] || r.origin[k] > hi[k]) return false;
      continue;
    }
    far *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return false;
  }
  entry = t0;
  return true;
}

}  // namespace

Bvh::Bvh(const SceneMesh& mesh) : mesh_(&mesh) {
  const auto n = static_cast<std::uint32_t>(mesh.triangle_count());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  if (n == 0) return;
  std::vector<Vec3> centroid_of(n);
  for (std::uint32_t t = 0; t < n; ++t) centroid_of[t] = mesh.centroid(t);
  nodes_.reserve(2 * n);
  build(0, n, centroid_of);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroid_of) {
  constexpr std::uint32_t kLeafSize = 4;
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  Vec3 clo = lo, chi = hi;
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t t = order_[i];
    for (int k = 0; k < 3; ++k) {
      lo = lo.cwiseMin(mesh_->vertex(t, k));
      hi = hi.cwiseMax(mesh_->vertex(t, k));
    }
    clo = clo.cwiseMin(centroid_of[t]);
    chi = chi.cwiseMax(centroid_of[t]);
  }
  nodes_[index].lo = lo;
  nodes_[index].hi = hi;

  const std::uint32_t count = end - begin;
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  if (count <= kLeafSize || chi[axis] <= clo[axis]) {
    nodes_[index].first = begin;
    nodes_[index].count = count;
    return index;
  }
  const std::uint32_t mid = begin + count / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroid_of[a][axis] != centroid_of[b][axis]) return centroid_of[a][axis] < centroid_of[b][axis];
                     return a < b;
                   });
  build(begin, mid, centroid_of);  // left child is always index + 1
  const std::uint32_t right = build(mid, end, centroid_of);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<Hit> Bvh::cast(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  const ShearedRay r(ray);
  NearestCollector nearest(tie_tolerance(*mesh_));
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry = 0.0;
    if (!box_entry(node.lo, node.hi, r, nearest.horizon(), entry)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t t = order_[i];
        nearest.offer(intersect(r, mesh_->vertex(t, 0), mesh_->vertex(t, 1), mesh_->vertex(t, 2)), t);
      }
      continue;
    }
    const std::uint32_t left = static_cast<std::uint32_t>(&node - nodes_.data()) + 1;
    const std::uint32_t right = node.first;
    double el = 0.0, er = 0.0;
    const bool hl = box_entry(nodes_[left].lo, nodes_[left].hi, r, nearest.horizon(), el);
    const bool hr = box_entry(nodes_[right].lo, nodes_[right].hi, r, nearest.horizon(), er);
    // Push the farther child first so the nearer one is visited next.
    if (hl && hr) {
      if (el <= er) {
        stack[top++] = right;
        stack[top++] = left;
      } else {
        stack[top++] = left;
        stack[top++] = right;
      }
    } else if (hl) {
      stack[top++] = left;
    } else if (hr) {
      stack[top++] = right;
    }
  }
  const auto best = nearest.result();
  if (!best) return std::nullopt;
  return make_hit(*mesh_, ray, *best);
}

std::optional<Hit> cast_ray(const Bvh& accel, const Ray& ray) { return accel.cast(ray); }

std::optional<Hit> cast_ray_brute(const SceneMesh& mesh, const Ray& ray) {
  const ShearedRay r(ray);
  NearestCollector nearest(tie_tolerance(mesh));
  for (std::uint32_t t = 0; t < mesh.triangle_count(); ++t) {
    nearest.offer(intersect(r, mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2)), t);
  }
  const auto best = nearest.result();
  if (!best) return std::nullopt;
  return make_hit(mesh, ray, *best);
}

}  // namespace obkit::geom
