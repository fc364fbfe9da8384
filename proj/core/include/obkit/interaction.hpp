#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obkit/raster.hpp"
#include "obkit/rng.hpp"

namespace obkit::interact {

/// Scribble coverage per channel, 1 where covered. Channels may overlap.
struct FnFpMap {
  BinaryMap fn;
  BinaryMap fp;

  FnFpMap() = default;
  explicit FnFpMap(Extent e) : fn(e), fp(e) {}
  FnFpMap(BinaryMap fn_channel, BinaryMap fp_channel);

  Extent extent() const { return fn.extent(); }
  bool empty() const;
  friend bool operator==(const FnFpMap&, const FnFpMap&) = default;
};

struct ScribbleConfig {
  double disk_radius = 12.0;
  int max_position_perturbation = 3;       // Chebyshev, pixels
  double length_perturbation_fraction = 0.2;  // per endpoint, of the segment length
  std::uint64_t rng_seed = 0;

  void validate() const;
  /// Exact scribbles: no length or position noise.
  static ScribbleConfig exact(double radius = 12.0);
};

struct SelectionConfig {
  std::size_t min_segment_length = 30;  // kept when strictly longer
  std::optional<std::size_t> max_segments;

  void validate() const;
  /// Limits used by the ablation runs (at most 12 per channel).
  static SelectionConfig ablation();
};

struct Residuals {
  std::vector<BoundarySegment> fn;
  std::vector<BoundarySegment> fp;
};

/// FN: gt pixels with no pred pixel within `tolerance`; FP: pred pixels with
/// no gt pixel within `tolerance`. Both traced into segments.
Residuals extract_residual_segments(const BinaryMap& pred, const BinaryMap& gt, double tolerance);

/// Pixels of `b` farther than `tolerance` from every on-pixel of `other`.
BinaryMap unmatched_pixels(const BinaryMap& b, const BinaryMap& other, double tolerance);

/// Luminance Canny edges (thinned) lying farther than `tolerance` from the gt.
std::vector<BoundarySegment> stage1_fp_source(const RgbImage& rgb, const BinaryMap& gt, double tolerance);

/// Each traced gt segment is kept with probability `fraction`.
std::vector<BoundarySegment> stage1_fn_source(const BinaryMap& gt, double fraction, Rng& rng);

/// Keeps segments longer than the minimum, longest first (ties by first
/// pixel in row-major order), truncated to max_segments.
std::vector<BoundarySegment> select_segments(std::vector<BoundarySegment> segs, const SelectionConfig& cfg);

/// Length and position noise applied to one segment. Returns sorted, unique
/// pixels inside `canvas`.
std::vector<Pixel> perturb_segment(const BoundarySegment& seg, const ScribbleConfig& cfg, Rng& rng, Extent canvas);

/// Perturbs every FN segment, then every FP segment, from one generator
/// seeded with cfg.rng_seed, and dilates each channel with the disk.
FnFpMap simulate_scribbles(const std::vector<BoundarySegment>& fn_segs, const std::vector<BoundarySegment>& fp_segs,
                           const ScribbleConfig& cfg, Extent canvas);

/// prev outside both channels, 0 inside fp, max(prev, candidate) inside fn.
/// fn takes precedence where the channels overlap.
ProbabilityMap refine(const ProbabilityMap& prev, const ProbabilityMap& candidate, const FnFpMap& fnfp);

/// Post-processing of a raw predictor output: NMS, then threshold.
ProbabilityMap postprocess(const ProbabilityMap& raw, const ThresholdConfig& cfg);

/// One interaction round: the candidate is thinned before merging so that
/// the result equals prev outside the scribbles. `prev` must already be a
/// post-processed map.
ProbabilityMap refine_round(const ProbabilityMap& prev, const ProbabilityMap& raw_candidate, const FnFpMap& fnfp,
                            const ThresholdConfig& cfg);

/// Thin binary boundary of a post-processed map.
BinaryMap boundary_of(const ProbabilityMap& map, const ThresholdConfig& cfg);

enum class Channel { fn, fp };

struct Stroke {
  Channel channel = Channel::fn;
  std::vector<Pixel> points;
  double radius = 12.0;
  friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct ScribbleDocument {
  std::vector<Stroke> strokes;
  friend bool operator==(const ScribbleDocument&, const ScribbleDocument&) = default;
};

/// JSON: {"strokes":[{"channel":"fn"|"fp","points":[[x,y],...],"radius":r}]}.
/// Throws ParseError on malformed documents.
ScribbleDocument parse_scribble_document(std::string_view text);
std::string format_scribble_document(const ScribbleDocument& doc);

/// Pixels of the polyline through the stroke points (8-connected lines).
std::vector<Pixel> stroke_pixels(const Stroke& stroke);
/// dilate_disk over each stroke's polyline pixels, clipped to the canvas.
FnFpMap rasterize(const ScribbleDocument& doc, Extent canvas);

/// Integer line from a to b, both ends included.
std::vector<Pixel> line_pixels(Pixel a, Pixel b);

}  // namespace obkit::interact
