#include "support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "obkit/raster_io.hpp"

namespace obkit::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "obkit-test-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::uint32_t MeshBuilder::vertex(const geom::Vec3& v) {
  vertices.push_back(v);
  return static_cast<std::uint32_t>(vertices.size() - 1);
}

void MeshBuilder::triangle(const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& c, int instance) {
  triangles.push_back({vertex(a), vertex(b), vertex(c)});
  instances.push_back(instance);
}

void MeshBuilder::quad(const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& c, const geom::Vec3& d, int instance) {
  triangle(a, b, c, instance);
  triangle(a, c, d, instance);
}

void MeshBuilder::box(const geom::Vec3& center, const geom::Vec3& half, double yaw, double pitch, int instance) {
  const geom::Mat3 r = (Eigen::AngleAxisd(yaw, geom::Vec3::UnitY()) * Eigen::AngleAxisd(pitch, geom::Vec3::UnitX()))
                           .toRotationMatrix();
  auto corner = [&](int sx, int sy, int sz) {
    return geom::Vec3(center + r * geom::Vec3(sx * half.x(), sy * half.y(), sz * half.z()));
  };
  quad(corner(-1, -1, -1), corner(1, -1, -1), corner(1, 1, -1), corner(-1, 1, -1), instance);
  quad(corner(-1, -1, 1), corner(-1, 1, 1), corner(1, 1, 1), corner(1, -1, 1), instance);
  quad(corner(-1, -1, -1), corner(-1, -1, 1), corner(1, -1, 1), corner(1, -1, -1), instance);
  quad(corner(-1, 1, -1), corner(1, 1, -1), corner(1, 1, 1), corner(-1, 1, 1), instance);
  quad(corner(-1, -1, -1), corner(-1, 1, -1), corner(-1, 1, 1), corner(-1, -1, 1), instance);
  quad(corner(1, -1, -1), corner(1, -1, 1), corner(1, 1, 1), corner(1, 1, -1), instance);
}

geom::SceneMesh MeshBuilder::build() const { return geom::SceneMesh::build(vertices, triangles, instances); }

std::string MeshBuilder::to_obj() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& v : vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  int current = -1;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    if (instances[t] != current) {
      current = instances[t];
      out << "o object" << current << '\n';
    }
    out << "f " << triangles[t][0] + 1 << ' ' << triangles[t][1] + 1 << ' ' << triangles[t][2] + 1 << '\n';
  }
  return out.str();
}

geom::PinholeCamera camera(int width, int height, double focal) {
  geom::PinholeCamera cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = focal;
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  return cam;
}

geom::SceneMesh fronto_quad(double x0, double x1, double y0, double y1, double z) {
  MeshBuilder b;
  b.quad({x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}, 0);
  return b.build();
}

geom::SceneMesh abutting_quads() {
  MeshBuilder b;
  b.quad({-0.5, -0.5, 2}, {0, -0.5, 2}, {0, 0.5, 2}, {-0.5, 0.5, 2}, 0);
  b.quad({0, -0.5, 2}, {0.5, -0.5, 2}, {0.5, 0.5, 2}, {0, 0.5, 2}, 1);
  return b.build();
}

geom::SceneMesh folded_sheet() {
  MeshBuilder b;
  const std::array<double, 4> xs{-2, -0.4, 0.4, 2};
  const std::array<double, 3> ys{-2, 0.3, 2};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i)
      b.quad({xs[i], ys[j], 2}, {xs[i + 1], ys[j], 2}, {xs[i + 1], ys[j + 1], 2}, {xs[i], ys[j + 1], 2}, 0);
  b.quad({-0.4, 0.3, 2}, {0.4, 0.3, 2}, {0.4, -0.4, 1.2}, {-0.4, -0.4, 1.2}, 0);
  return b.build();
}

BinaryMap brute_disk(const std::vector<Pixel>& points, double radius, Extent canvas) {
  BinaryMap out(canvas);
  for (int y = 0; y < canvas.height; ++y)
    for (int x = 0; x < canvas.width; ++x)
      for (const Pixel p : points) {
        const double dx = x - p.x, dy = y - p.y;
        if (std::sqrt(dx * dx + dy * dy) <= radius) {
          out(x, y) = 1;
          break;
        }
      }
  return out;
}

std::size_t kuhn_matching(const BinaryMap& pred, const BinaryMap& gt, double d_max) {
  std::vector<Pixel> left, right;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      if (pred(x, y)) left.push_back({x, y});
      if (gt(x, y)) right.push_back({x, y});
    }
  std::vector<std::vector<int>> adj(left.size());
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j) {
      const double dx = left[i].x - right[j].x, dy = left[i].y - right[j].y;
      if (std::sqrt(dx * dx + dy * dy) <= d_max) adj[i].push_back(static_cast<int>(j));
    }
  std::vector<int> owner(right.size(), -1);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    std::vector<char> seen(right.size(), 0);
    std::function<bool(int)> try_augment = [&](int u) {
      for (const int v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        if (owner[v] < 0 || try_augment(owner[v])) {
          owner[v] = u;
          return true;
        }
      }
      return false;
    };
    if (try_augment(static_cast<int>(i))) ++matched;
  }
  return matched;
}

std::optional<BruteHit> moller_trumbore_nearest(const geom::SceneMesh& mesh, const geom::Ray& ray) {
  std::optional<BruteHit> best;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const geom::Vec3 e1 = mesh.vertex(t, 1) - mesh.vertex(t, 0);
    const geom::Vec3 e2 = mesh.vertex(t, 2) - mesh.vertex(t, 0);
    const geom::Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-15) continue;
    const geom::Vec3 s = ray.origin - mesh.vertex(t, 0);
    const double u = s.dot(p) / det;
    const geom::Vec3 q = s.cross(e1);
    const double v = ray.direction.dot(q) / det;
    const double d = e2.dot(q) / det;
    const double margin = std::min({u, v, 1.0 - u - v});
    if (margin < 0.0 || d <= 0.0) continue;
    if (!best || d < best->t) best = BruteHit{static_cast<int>(t), d, margin};
  }
  return best;
}

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double s = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(px - (ax + s * vx), py - (ay + s * vy));
}

BinaryMap random_thin_map(Extent e, Rng& rng, int walks, int steps) {
  BinaryMap m(e);
  auto would_fill_square = [&](Pixel p) {
    for (int oy = -1; oy <= 0; ++oy)
      for (int ox = -1; ox <= 0; ++ox) {
        int on = 0;
        for (int dy = 0; dy <= 1; ++dy)
          for (int dx = 0; dx <= 1; ++dx) {
            const Pixel q{p.x + ox + dx, p.y + oy + dy};
            if (q == p || (e.contains(q) && m[q])) ++on;
          }
        if (on == 4) return true;
      }
    return false;
  };
  static constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  for (int w = 0; w < walks; ++w) {
    Pixel p{static_cast<int>(rng.uniform_int(0, e.width - 1)), static_cast<int>(rng.uniform_int(0, e.height - 1))};
    int dir = static_cast<int>(rng.uniform_int(0, 7));
    for (int s = 0; s < steps; ++s) {
      if (!would_fill_square(p)) m[p] = 1;
      dir = (dir + static_cast<int>(rng.uniform_int(-1, 1)) + 8) % 8;
      const Pixel q{p.x + kDx[dir], p.y + kDy[dir]};
      if (!e.contains(q)) break;
      p = q;
    }
  }
  return m;
}

geom::SceneMesh random_triangle_soup(Rng& rng, int triangles) {
  MeshBuilder b;
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); };
  while (static_cast<int>(b.triangles.size()) < triangles) {
    const geom::Vec3 c(u(-1, 1), u(-1, 1), u(-1, 1));
    geom::Vec3 v[3];
    for (auto& x : v) x = c + geom::Vec3(u(-0.4, 0.4), u(-0.4, 0.4), u(-0.4, 0.4));
    if ((v[1] - v[0]).cross(v[2] - v[0]).norm() < 1e-3) continue;
    b.triangle(v[0], v[1], v[2], static_cast<int>(b.triangles.size()) % 5);
  }
  return b.build();
}

namespace {

geom::SceneMesh box_layout(Rng& rng) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); };
  MeshBuilder b;
  b.quad({-8, -8, 8}, {8, -8, 8}, {8, 8, 8}, {-8, 8, 8}, 0);
  const int boxes = 3 + static_cast<int>(rng.uniform_int(0, 1));
  for (int i = 0; i < boxes; ++i) {
    const double z = 2.0 + 1.5 * i;
    const geom::Vec3 center(z * u(-0.3, 0.3), z * u(-0.3, 0.3), z);
    const geom::Vec3 half(u(0.2, 0.45), u(0.2, 0.45), u(0.15, 0.3));
    b.box(center, half, u(-0.6, 0.6), u(-0.4, 0.4), i + 1);
  }
  return b.build();
}

}  // namespace

SyntheticSample box_scene(std::uint64_t seed, int size, double bar_clearance) {
  Rng rng(seed);
  const geom::PinholeCamera cam = camera(size, size, size);
  const geom::SceneMesh mesh = box_layout(rng);
  const geom::Bvh bvh(mesh);
  gen::GeneratedSample g = gen::generate_ob(bvh, cam, gen::GenConfig{});

  static constexpr std::array<Rgb8, 6> kPalette{
      Rgb8{128, 128, 128}, Rgb8{200, 60, 60}, Rgb8{60, 200, 60}, Rgb8{60, 60, 200}, Rgb8{220, 200, 40}, Rgb8{40, 200, 200}};
  SyntheticSample s;
  s.id = "scene" + std::to_string(seed);
  s.rgb = RgbImage(cam.extent());
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (const auto& hit = g.gbuffer.at(x, y)) s.rgb(x, y) = kPalette[hit->instance % kPalette.size()];

  BinaryMap blocked = dilate_disk(on_pixels(g.ob.boundary), bar_clearance, cam.extent());
  int placed = 0;
  for (int attempt = 0; attempt < 400 && placed < 6; ++attempt) {
    const bool horizontal = rng.bernoulli(0.5);
    const int len = static_cast<int>(rng.uniform_int(30, 60));
    const int w = horizontal ? len : 3, h = horizontal ? 3 : len;
    const int x0 = static_cast<int>(rng.uniform_int(4, size - w - 5));
    const int y0 = static_cast<int>(rng.uniform_int(4, size - h - 5));
    if (x0 < 4 || y0 < 4) continue;
    bool ok = true;
    for (int y = y0; y < y0 + h && ok; ++y)
      for (int x = x0; x < x0 + w && ok; ++x) ok = !blocked(x, y);
    if (!ok) continue;
    const Rgb8 under = s.rgb(x0, y0);
    const double luma = 0.299 * under.r + 0.587 * under.g + 0.114 * under.b;
    const Rgb8 ink = luma > 110 ? Rgb8{0, 0, 0} : Rgb8{255, 255, 255};
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) s.rgb(x, y) = ink;
    // Keep later bars apart from this one.
    for (int y = std::max(0, y0 - 8); y < std::min(size, y0 + h + 8); ++y)
      for (int x = std::max(0, x0 - 8); x < std::min(size, x0 + w + 8); ++x) blocked(x, y) = 1;
    ++placed;
  }
  s.gt = g.ob.boundary;
  s.depth = g.gbuffer.depth_map();
  s.ob = std::move(g.ob);
  return s;
}

void write_samples(const std::vector<SyntheticSample>& samples, const std::filesystem::path& dir) {
  for (const auto& s : samples) {
    io::write_rgb(dir / "images" / (s.id + ".png"), s.rgb);
    io::write_mask(dir / "gt" / (s.id + ".png"), s.gt);
  }
}

}  // namespace obkit::testing
