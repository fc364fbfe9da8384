#include <gtest/gtest.h>

#include "obkit/dataset.hpp"
#include "obkit/obgen.hpp"
#include "obkit/raster_io.hpp"
#include "support.hpp"

namespace obkit::gen {
namespace {

using geom::Vec3;
using testing::MeshBuilder;
using testing::TempDir;

std::optional<geom::Hit> hit_at(const geom::Bvh& bvh, const geom::PinholeCamera& cam, int x, int y) {
  auto h = geom::cast_ray(bvh, geom::pixel_ray(cam, x, y));
  if (h) h->depth = cam.to_camera(h->point).z();
  return h;
}

OcclusionVerdict verdict(const geom::SceneMesh& mesh, const geom::PinholeCamera& cam, int x0, int y0, int x1, int y1,
                         const GenConfig& cfg = {}) {
  const geom::Bvh bvh(mesh);
  const auto a = hit_at(bvh, cam, x0, y0);
  const auto b = hit_at(bvh, cam, x1, y1);
  EXPECT_TRUE(a && b);
  const auto& nearer = a->depth <= b->depth ? *a : *b;
  return occlusion_test(mesh, *a, *b, footprint(cam, nearer, y0 == y1), cfg);
}

TEST(GenConfig, Validation) {
  GenConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gap_factor = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.adjacency_walk_limit = -1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.supersample = 3;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(OcclusionTest, SameQuadIsContinuous) {
  const auto mesh = testing::fronto_quad(-1, 1, -1, 1, 2);
  const auto v = verdict(mesh, testing::camera(), 100, 100, 101, 100);
  EXPECT_EQ(v.kind, VerdictKind::continuous);
  EXPECT_EQ(v.occluder, OccluderSide::none);
}

TEST(OcclusionTest, NearQuadOccludesFarQuad) {
  MeshBuilder b;
  b.quad({-0.25, -0.25, 1}, {0.25, -0.25, 1}, {0.25, 0.25, 1}, {-0.25, 0.25, 1}, 0);
  b.quad({-3, -3, 3}, {3, -3, 3}, {3, 3, 3}, {-3, 3, 3}, 1);
  const auto mesh = b.build();
  // The near quad's right edge projects to x = 128 + 64 = 192.
  const auto v = verdict(mesh, testing::camera(), 191, 128, 192, 128);
  EXPECT_EQ(v.kind, VerdictKind::inter_object_occlusion);
  EXPECT_EQ(v.occluder, OccluderSide::first_pixel);
  const auto w = verdict(mesh, testing::camera(), 192, 128, 191, 128);
  EXPECT_EQ(w.kind, VerdictKind::inter_object_occlusion);
  EXPECT_EQ(w.occluder, OccluderSide::second_pixel);
}

TEST(OcclusionTest, FoldedSheetIsSelfOcclusion) {
  const auto mesh = testing::folded_sheet();
  const auto cam = testing::camera();
  const geom::Bvh bvh(mesh);
  // The flap's side edges hide part of the sheet beside it.
  int found = 0;
  for (int x = 140; x < 250 && !found; ++x) {
    const auto a = hit_at(bvh, cam, x, 60), b = hit_at(bvh, cam, x + 1, 60);
    if (a && b && std::abs(a->depth - b->depth) > 0.3) {
      const auto v = verdict(mesh, cam, x, 60, x + 1, 60);
      EXPECT_EQ(v.kind, VerdictKind::self_occlusion);
      EXPECT_EQ(v.occluder, a->depth < b->depth ? OccluderSide::first_pixel : OccluderSide::second_pixel);
      found = x;
    }
  }
  EXPECT_GT(found, 0);
}

TEST(OcclusionTest, BoxCreaseIsContinuous) {
  MeshBuilder b;
  b.box({0, 0, 2.5}, {0.4, 0.4, 0.4}, 0.7, 0.35, 0);
  const auto mesh = b.build();
  const auto cam = testing::camera();
  const geom::Bvh bvh(mesh);
  std::size_t pairs = 0;
  for (int y = 60; y < 196; ++y)
    for (int x = 60; x < 196; ++x) {
      const auto a = hit_at(bvh, cam, x, y), c = hit_at(bvh, cam, x + 1, y);
      if (!a || !c || a->triangle == c->triangle) continue;
      ++pairs;
      const auto& nearer = a->depth <= c->depth ? *a : *c;
      EXPECT_EQ(occlusion_test(mesh, *a, *c, footprint(cam, nearer, true), GenConfig{}).kind,
                VerdictKind::continuous);
    }
  EXPECT_GT(pairs, 50u);
}

TEST(OcclusionTest, ContactNeedsTolerance) {
  // Two different objects 1 mm apart in depth, side by side.
  MeshBuilder b;
  b.quad({-1, -1, 2}, {0, -1, 2}, {0, 1, 2}, {-1, 1, 2}, 0);
  b.quad({0, -1, 2.02}, {1, -1, 2.02}, {1, 1, 2.02}, {0, 1, 2.02}, 1);
  const auto mesh = b.build();
  const auto cam = testing::camera();
  GenConfig cfg;
  cfg.gap_factor = 1.5;
  cfg.contact_tolerance = 5.0;
  cfg.adjacency_walk_limit = 0;
  EXPECT_EQ(verdict(mesh, cam, 127, 128, 128, 128, cfg).kind, VerdictKind::contact);
  cfg.contact_tolerance = 0.5;
  EXPECT_EQ(verdict(mesh, cam, 127, 128, 128, 128, cfg).kind, VerdictKind::inter_object_occlusion);
}

TEST(OcclusionTest, SymmetricAndScaleInvariant) {
  const auto cam = testing::camera(64, 64, 64);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    MeshBuilder b;
    b.quad({-8, -8, 8}, {8, -8, 8}, {8, 8, 8}, {-8, 8, 8}, 0);
    b.box({0.2, 0, 2.5}, {0.5, 0.4, 0.3}, 0.5 * seed, 0.3, 1);
    b.box({-0.5, 0.3, 4}, {0.7, 0.5, 0.4}, -0.4, 0.1 * seed, 2);
    MeshBuilder scaled = b;
    for (auto& v : scaled.vertices) v *= 3.7;
    const auto mesh = b.build(), big = scaled.build();
    const geom::Bvh bvh(mesh), bvh_big(big);
    const GenConfig cfg;
    for (int y = 0; y < 63; ++y)
      for (int x = 0; x < 63; ++x) {
        const auto a = hit_at(bvh, cam, x, y), c = hit_at(bvh, cam, x, y + 1);
        if (!a || !c) continue;
        const auto& nearer = a->depth <= c->depth ? *a : *c;
        const double fp = footprint(cam, nearer, false);
        const auto pq = occlusion_test(mesh, *a, *c, fp, cfg);
        const auto qp = occlusion_test(mesh, *c, *a, fp, cfg);
        ASSERT_EQ(pq.kind, qp.kind);
        if (pq.occluder != OccluderSide::none)
          EXPECT_NE(pq.occluder, qp.occluder);
        const auto sa = hit_at(bvh_big, cam, x, y), sc = hit_at(bvh_big, cam, x, y + 1);
        ASSERT_TRUE(sa && sc);
        const auto& snear = sa->depth <= sc->depth ? *sa : *sc;
        EXPECT_EQ(occlusion_test(big, *sa, *sc, footprint(cam, snear, false), cfg), pq) << x << "," << y;
      }
  }
}

TEST(Generate, EmptyScene) {
  const geom::SceneMesh mesh;
  const geom::Bvh bvh(mesh);
  const auto g = generate_ob(bvh, testing::camera(32, 32, 32), GenConfig{});
  EXPECT_EQ(count_on(g.ob.boundary), 0u);
}

TEST(Generate, QuadOutlineLabels) {
  const auto mesh = testing::fronto_quad(-0.5, 0.5, -0.5, 0.5, 2);
  const geom::Bvh bvh(mesh);
  const auto g = generate_ob(bvh, testing::camera(), GenConfig{});
  EXPECT_TRUE(is_thin(g.ob.boundary));
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      EXPECT_EQ(g.ob.boundary(x, y) != 0, g.ob.labels(x, y) != BoundaryLabel::none);
      if (g.ob.boundary(x, y)) {
        EXPECT_EQ(g.ob.labels(x, y), BoundaryLabel::inter_object);
        // Marks sit on the quad side.
        EXPECT_TRUE(g.gbuffer.at(x, y).has_value());
      }
    }
}

TEST(Generate, OverlappingQuads) {
  // Near quad [-0.5,0.25]^2 at z=2 over far quad [-0.5,2]^2 at z=4.
  MeshBuilder c;
  c.quad({-0.5, -0.5, 2}, {0.25, -0.5, 2}, {0.25, 0.25, 2}, {-0.5, 0.25, 2}, 0);
  c.quad({-0.5, -0.5, 4}, {2, -0.5, 4}, {2, 2, 4}, {-0.5, 2, 4}, 1);
  const auto mesh = c.build();
  const geom::Bvh bvh(mesh);
  const auto g = generate_ob(bvh, testing::camera(), GenConfig{});
  // Near outline: x, y in [64, 160]. Far quad starts at x = y = 128 - 32 = 96.
  auto on_near = [&](int x, int y) { return g.ob.boundary(x, y) != 0; };
  std::size_t near_right = 0, near_bottom = 0;
  for (int t = 66; t < 158; ++t) {
    near_right += on_near(159, t);
    near_bottom += on_near(t, 159);
  }
  EXPECT_GT(near_right, 85u);   // also where it crosses the far quad
  EXPECT_GT(near_bottom, 85u);
  // The far quad's left edge at x = 96 is hidden for rows inside the near quad.
  std::size_t hidden = 0;
  for (int y = 100; y < 155; ++y) hidden += g.ob.boundary(96, y);
  EXPECT_EQ(hidden, 0u);
  // and visible below it.
  std::size_t visible = 0;
  for (int y = 165; y < 250; ++y) visible += g.ob.boundary(96, y);
  EXPECT_GT(visible, 70u);
}

TEST(Generate, EveryOcclusionPairIsMarked) {
  MeshBuilder b;
  b.quad({-8, -8, 8}, {8, -8, 8}, {8, 8, 8}, {-8, 8, 8}, 0);
  b.box({0.2, 0, 2.5}, {0.5, 0.4, 0.3}, 0.5, 0.3, 1);
  b.box({-0.5, 0.3, 4}, {0.7, 0.5, 0.4}, -0.4, 0.1, 2);
  const auto mesh = b.build();
  const geom::Bvh bvh(mesh);
  const auto cam = testing::camera(64, 64, 64);
  const GenConfig cfg;
  const auto g = generate_ob(bvh, cam, cfg);
  std::size_t checked = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (const auto [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (x + dx >= 64 || y + dy >= 64) continue;
        const auto& a = g.gbuffer.at(x, y);
        const auto& c = g.gbuffer.at(x + dx, y + dy);
        if (!a || !c) continue;
        const auto& nearer = a->depth <= c->depth ? *a : *c;
        const auto v = occlusion_test(mesh, *a, *c, footprint(cam, nearer, dy == 0), cfg);
        if (!v.is_boundary()) continue;
        const int ox = v.occluder == OccluderSide::first_pixel ? x : x + dx;
        const int oy = v.occluder == OccluderSide::first_pixel ? y : y + dy;
        if (ox == 0 || oy == 0 || ox == 63 || oy == 63) continue;
        ++checked;
        EXPECT_EQ(g.raw(ox, oy), 1) << ox << "," << oy;
      }
  EXPECT_GT(checked, 20u);
}

TEST(Generate, JobsDoNotChangeOutput) {
  MeshBuilder b;
  b.quad({-8, -8, 8}, {8, -8, 8}, {8, 8, 8}, {-8, 8, 8}, 0);
  b.box({0.2, 0, 2.5}, {0.5, 0.4, 0.3}, 0.5, 0.3, 1);
  const auto mesh = b.build();
  const geom::Bvh bvh(mesh);
  GenConfig one, four;
  four.jobs = 4;
  const auto a = generate_ob(bvh, testing::camera(96, 96, 96), one);
  const auto c = generate_ob(bvh, testing::camera(96, 96, 96), four);
  EXPECT_EQ(a.ob.boundary, c.ob.boundary);
  EXPECT_EQ(a.ob.labels, c.ob.labels);
}

TEST(Labels, EncodeDecode) {
  ObMap ob;
  ob.boundary = BinaryMap(3, 1);
  ob.labels = Raster<BoundaryLabel>(3, 1);
  ob.boundary(0, 0) = 1;
  ob.labels(0, 0) = BoundaryLabel::inter_object;
  ob.boundary(2, 0) = 1;
  ob.labels(2, 0) = BoundaryLabel::self_occlusion;
  const auto enc = encode_labels(ob);
  EXPECT_EQ(enc(0, 0), 255);
  EXPECT_EQ(enc(1, 0), 0);
  EXPECT_EQ(enc(2, 0), 128);
  const auto dec = decode_labels(enc);
  EXPECT_EQ(dec.boundary, ob.boundary);
  EXPECT_EQ(dec.labels, ob.labels);
}

TEST(Shade, BackgroundBlackAndInstancesDistinct) {
  MeshBuilder b;
  b.quad({-1, -1, 3}, {0, -1, 3}, {0, 1, 3}, {-1, 1, 3}, 0);
  b.quad({0, -1, 3}, {1, -1, 3}, {1, 1, 3}, {0, 1, 3}, 1);
  const auto mesh = b.build();
  const geom::Bvh bvh(mesh);
  const auto cam = testing::camera(64, 64, 64);
  const auto img = shade(geom::render_gbuffer(bvh, cam), cam);
  EXPECT_EQ(img(0, 0), (Rgb8{0, 0, 0}));
  EXPECT_NE(img(20, 32), img(44, 32));
  EXPECT_NE(img(20, 32), (Rgb8{0, 0, 0}));
}

ExportSample sample_named(const std::string& name, std::uint64_t seed) {
  const auto s = testing::box_scene(seed, 64, 6.0);
  return {name, std::nullopt, s.rgb, s.ob, s.depth};
}

TEST(Export, SingleSample) {
  TempDir tmp;
  const std::vector<ExportSample> samples{sample_named("a", 1)};
  const auto m = export_benchmark(samples, tmp / "out");
  ASSERT_EQ(m.samples.size(), 1u);
  const auto& e = m.samples[0];
  for (const auto* ref : {&e.gt, &*e.labels, &*e.depth, &*e.rgb})
    EXPECT_TRUE(std::filesystem::exists(tmp / "out" / ref->path)) << ref->path;
  EXPECT_EQ(io::read_mask(tmp / "out" / e.gt.path), samples[0].ob.boundary);
  EXPECT_TRUE(std::filesystem::exists(tmp / "out" / "manifest"));
}

TEST(Export, NameCollisionGetsSuffix) {
  TempDir tmp;
  const std::vector<ExportSample> samples{sample_named("x", 1), sample_named("x", 2)};
  const auto m = export_benchmark(samples, tmp / "out");
  ASSERT_EQ(m.samples.size(), 2u);
  EXPECT_EQ(m.samples[0].id, "x");
  EXPECT_NE(m.samples[1].id, "x");
  EXPECT_NE(m.samples[0].gt.path, m.samples[1].gt.path);
}

TEST(Export, Reproducible) {
  TempDir tmp;
  const std::vector<ExportSample> samples{sample_named("a", 1), sample_named("b", 2)};
  export_benchmark(samples, tmp / "one");
  export_benchmark(samples, tmp / "two");
  for (const auto& entry : std::filesystem::recursive_directory_iterator(tmp / "one")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), tmp / "one");
    EXPECT_EQ(io::read_file(entry.path()), io::read_file(tmp / "two" / rel)) << rel;
  }
}

TEST(Export, CopiesRgbPath) {
  TempDir tmp;
  RgbImage img(64, 64);
  img(3, 3) = {1, 2, 3};
  io::write_rgb(tmp / "photo.png", img);
  auto s = sample_named("p", 4);
  s.rgb.reset();
  s.rgb_path = tmp / "photo.png";
  const std::vector<ExportSample> samples{s};
  const auto m = export_benchmark(samples, tmp / "out");
  ASSERT_TRUE(m.samples[0].rgb);
  EXPECT_EQ(io::read_file(tmp / "out" / m.samples[0].rgb->path), io::read_file(tmp / "photo.png"));
}

}  // namespace
}  // namespace obkit::gen
