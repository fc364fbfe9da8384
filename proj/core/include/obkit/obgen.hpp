#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obkit/dataset.hpp"
#include "obkit/geometry.hpp"
#include "obkit/raster.hpp"

namespace obkit::gen {

enum class VerdictKind { continuous, inter_object_occlusion, self_occlusion, contact };
enum class OccluderSide { first_pixel, second_pixel, none };

struct OcclusionVerdict {
  VerdictKind kind = VerdictKind::continuous;
  OccluderSide occluder = OccluderSide::none;

  bool is_boundary() const {
    return kind == VerdictKind::inter_object_occlusion || kind == VerdictKind::self_occlusion;
  }
  friend bool operator==(const OcclusionVerdict&, const OcclusionVerdict&) = default;
};

enum class BoundaryLabel : std::uint8_t { none = 0, inter_object = 1, self_occlusion = 2 };

/// Thin boundary map plus a label on exactly the on-pixels.
struct ObMap {
  BinaryMap boundary;
  Raster<BoundaryLabel> labels;

  Extent extent() const { return boundary.extent(); }
};

struct GenConfig {
  double gap_factor = 3.0;           // lambda; gaps up to lambda * footprint are continuous
  int adjacency_walk_limit = 8;      // triangles in an edge-adjacency walk, 0 disables
  double contact_tolerance = 0.5;    // multiple of footprint
  int supersample = 1;
  unsigned jobs = 1;

  void validate() const;
};

/// Expected 3D spacing of two adjacent pixel rays at the nearer hit:
/// depth * (1 / focal) / max(cos(incidence), 0.2). `horizontal` selects fx.
double footprint(const geom::PinholeCamera& cam, const geom::Hit& nearer, bool horizontal);

/// Classifies the surfaces on the two sides of a pixel pair. Rules in order:
/// small gap -> continuous; short edge-adjacency walk between the triangles
/// -> continuous; different objects within contact tolerance -> contact;
/// otherwise an occlusion (inter-object or self) with the nearer side as
/// occluder.
OcclusionVerdict occlusion_test(const geom::SceneMesh& mesh, const geom::Hit& p, const geom::Hit& q,
                                double footprint, const GenConfig& cfg);

struct GeneratedSample {
  ObMap ob;
  geom::GBuffer gbuffer;
  BinaryMap raw;  // boundary marks before thinning
};

/// Full-image occlusion boundaries for every 4-adjacent pixel pair. Marks go
/// on the occluder side only; the frame border itself is never marked.
GeneratedSample generate_ob(const geom::Bvh& accel, const geom::PinholeCamera& cam, const GenConfig& cfg);

/// Flat-shaded rendering: a per-instance albedo scaled by the cosine between
/// the normal and the viewing ray. Background is black.
RgbImage shade(const geom::GBuffer& gbuffer, const geom::PinholeCamera& cam);

/// Label raster encoding used on disk: 0 none, 255 inter-object, 128 self-occlusion.
Raster<std::uint8_t> encode_labels(const ObMap& ob);
ObMap decode_labels(const Raster<std::uint8_t>& labels);

struct ExportSample {
  std::string name;
  std::optional<std::filesystem::path> rgb_path;  // copied as is
  std::optional<RgbImage> rgb;                     // written as PNG when no path is given
  ObMap ob;
  Raster<float> depth;
};

/// Writes gt/<id>.png, labels/<id>.png, depth/<id>.obfmap, images/<id>.<ext>
/// (when an image is given) and <out>/manifest. Colliding names get a numeric
/// suffix. Output bytes depend only on the inputs.
dataset::Manifest export_benchmark(std::span<const ExportSample> samples, const std::filesystem::path& out_dir,
                                   const std::string& benchmark_name = "obkit");

}  // namespace obkit::gen
