#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>

#include "obkit/interaction.hpp"

namespace obkit::interact {

BinaryMap unmatched_pixels(const BinaryMap& b, const BinaryMap& other, double tolerance) {
  require_same_extent(b, other, "residual maps differ in size");
  const auto others = on_pixels(other);
  const BinaryMap near = dilate_disk(others, tolerance, other.extent());
  BinaryMap out(b.extent());
  for (std::size_t i = 0; i < b.size(); ++i) out.data()[i] = (b.data()[i] && !near.data()[i]) ? 1 : 0;
  return out;
}

Residuals extract_residual_segments(const BinaryMap& pred, const BinaryMap& gt, double tolerance) {
  require_same_extent(pred, gt, "prediction and gt differ in size");
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative match tolerance");
  Residuals r;
  r.fn = trace_segments(unmatched_pixels(gt, pred, tolerance));
  r.fp = trace_segments(unmatched_pixels(pred, gt, tolerance));
  return r;
}

std::vector<BoundarySegment> stage1_fp_source(const RgbImage& rgb, const BinaryMap& gt, double tolerance) {
  require_same_extent(rgb, gt, "image and gt differ in size");
  if (rgb.empty()) return {};
  cv::Mat luma(rgb.height(), rgb.width(), CV_8UC1);
  for (int y = 0; y < rgb.height(); ++y) {
    auto* dst = luma.ptr<std::uint8_t>(y);
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb8 c = rgb(x, y);
      dst[x] = static_cast<std::uint8_t>(std::lround(0.299 * c.r + 0.587 * c.g + 0.114 * c.b));
    }
  }
  cv::Mat edges;
  cv::Canny(luma, edges, 50.0, 150.0, 3, true);
  BinaryMap e(rgb.extent());
  for (int y = 0; y < rgb.height(); ++y) {
    const auto* src = edges.ptr<std::uint8_t>(y);
    for (int x = 0; x < rgb.width(); ++x) e(x, y) = src[x] ? 1 : 0;
  }
  return trace_segments(unmatched_pixels(morph_thin(e), gt, tolerance));
}

std::vector<BoundarySegment> stage1_fn_source(const BinaryMap& gt, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "fraction outside [0,1]");
  std::vector<BoundarySegment> out;
  for (auto& s : trace_segments(gt)) {
    if (rng.bernoulli(fraction)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<BoundarySegment> select_segments(std::vector<BoundarySegment> segs, const SelectionConfig& cfg) {
  cfg.validate();
  std::erase_if(segs, [&](const BoundarySegment& s) { return s.length() <= cfg.min_segment_length; });
  std::sort(segs.begin(), segs.end(), [](const BoundarySegment& a, const BoundarySegment& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.points.front() < b.points.front();
  });
  if (cfg.max_segments && segs.size() > *cfg.max_segments) segs.resize(*cfg.max_segments);
  return segs;
}

void ScribbleConfig::validate() const {
  if (!(disk_radius >= 0.0) || !std::isfinite(disk_radius)) throw Error(ErrorCode::InvalidArgument, "disk radius must be >= 0");
  if (max_position_perturbation < 0) throw Error(ErrorCode::InvalidArgument, "position perturbation must be >= 0");
  if (!(length_perturbation_fraction >= 0.0 && length_perturbation_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "length perturbation fraction outside [0,1]");
  }
}

ScribbleConfig ScribbleConfig::exact(double radius) {
  ScribbleConfig c;
  c.disk_radius = radius;
  c.max_position_perturbation = 0;
  c.length_perturbation_fraction = 0.0;
  return c;
}

void SelectionConfig::validate() const {
  if (min_segment_length < 1) throw Error(ErrorCode::InvalidArgument, "minimum segment length must be >= 1");
}

SelectionConfig SelectionConfig::ablation() {
  SelectionConfig c;
  c.max_segments = 12;
  return c;
}

}  // namespace obkit::interact
