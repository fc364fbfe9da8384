#include <cstdint>
#include <vector>

#include "obkit/obgen.hpp"
#include "obkit/parallel.hpp"

namespace obkit::gen {
namespace {

struct PairMark {
  std::int8_t side = -1;  // -1 none, 0 first pixel, 1 second pixel
  BoundaryLabel label = BoundaryLabel::none;
};

PairMark classify_pair(const geom::SceneMesh& mesh, const geom::PinholeCamera& cam,
                       const std::optional<geom::Hit>& a, const std::optional<geom::Hit>& b,
                       bool horizontal, const GenConfig& cfg) {
  if (!a && !b) return {};
  if (a && !b) return {0, BoundaryLabel::inter_object};
  if (!a && b) return {1, BoundaryLabel::inter_object};
  const geom::Hit& near_hit = a->depth <= b->depth ? *a : *b;
  const OcclusionVerdict v = occlusion_test(mesh, *a, *b, footprint(cam, near_hit, horizontal), cfg);
  if (!v.is_boundary()) return {};
  return {static_cast<std::int8_t>(v.occluder == OccluderSide::first_pixel ? 0 : 1),
          v.kind == VerdictKind::inter_object_occlusion ? BoundaryLabel::inter_object
                                                        : BoundaryLabel::self_occlusion};
}

void put_label(Raster<BoundaryLabel>& labels, int x, int y, BoundaryLabel label) {
  if (x <= 0 || y <= 0 || x >= labels.width() - 1 || y >= labels.height() - 1) return;
  BoundaryLabel& cur = labels(x, y);
  // Inter-object wins over self-occlusion when both claim a pixel.
  if (cur == BoundaryLabel::none || label == BoundaryLabel::inter_object) cur = label;
}

}  // namespace

GeneratedSample generate_ob(const geom::Bvh& accel, const geom::PinholeCamera& cam, const GenConfig& cfg) {
  cfg.validate();
  cam.validate();
  GeneratedSample out;
  out.gbuffer = geom::render_gbuffer(accel, cam, cfg.supersample, cfg.jobs);
  const geom::GBuffer& g = out.gbuffer;
  const int w = cam.width, h = cam.height;

  // Horizontal pairs belong to their row, vertical pairs to the upper row.
  Raster<PairMark> right(w, h), down(w, h);
  parallel_for(static_cast<std::size_t>(h), cfg.jobs, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) right(x, y) = classify_pair(accel.mesh(), cam, g.at(x, y), g.at(x + 1, y), true, cfg);
      if (y + 1 < h) down(x, y) = classify_pair(accel.mesh(), cam, g.at(x, y), g.at(x, y + 1), false, cfg);
    }
  });

  Raster<BoundaryLabel> raw_labels(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (const PairMark m = right(x, y); m.side >= 0) put_label(raw_labels, x + m.side, y, m.label);
      if (const PairMark m = down(x, y); m.side >= 0) put_label(raw_labels, x, y + m.side, m.label);
    }
  }

  out.raw = BinaryMap(w, h);
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    out.raw.data()[i] = raw_labels.data()[i] != BoundaryLabel::none ? 1 : 0;
  }
  out.ob.boundary = morph_thin(out.raw);
  out.ob.labels = Raster<BoundaryLabel>(w, h);
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    if (out.ob.boundary.data()[i]) out.ob.labels.data()[i] = raw_labels.data()[i];
  }
  return out;
}

Raster<std::uint8_t> encode_labels(const ObMap& ob) {
  Raster<std::uint8_t> img(ob.extent());
  for (std::size_t i = 0; i < img.size(); ++i) {
    switch (ob.labels.data()[i]) {
      case BoundaryLabel::inter_object: img.data()[i] = 255; break;
      case BoundaryLabel::self_occlusion: img.data()[i] = 128; break;
      case BoundaryLabel::none: img.data()[i] = 0; break;
    }
  }
  return img;
}

ObMap decode_labels(const Raster<std::uint8_t>& img) {
  ObMap ob{BinaryMap(img.extent()), Raster<BoundaryLabel>(img.extent())};
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint8_t v = img.data()[i];
    if (v == 0) continue;
    if (v != 255 && v != 128) throw Error(ErrorCode::ParseError, "label value outside {0,128,255}");
    ob.boundary.data()[i] = 1;
    ob.labels.data()[i] = v == 255 ? BoundaryLabel::inter_object : BoundaryLabel::self_occlusion;
  }
  return ob;
}

}  // namespace obkit::gen
