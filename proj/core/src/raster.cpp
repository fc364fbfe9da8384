#include <algorithm>
#include <cmath>
#include <string>

#include "obkit/raster.hpp"

namespace obkit {

void validate_probability(const ProbabilityMap& p) {
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      const float v = p(x, y);
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
        throw Error(ErrorCode::InvalidArgument, "probability out of [0,1] at (" +
                                                    std::to_string(x) + "," +
                                                    std::to_string(y) + ")");
      }
    }
  }
}

std::size_t count_on(const BinaryMap& b) {
  return static_cast<std::size_t>(
      std::count_if(b.data().begin(), b.data().end(), [](std::uint8_t v) { return v != 0; }));
}

std::vector<Pixel> on_pixels(const BinaryMap& b) {
  std::vector<Pixel> out;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x)
      if (b(x, y)) out.push_back({x, y});
  return out;
}

BinaryMap to_binary(const ProbabilityMap& p) {
  BinaryMap out(p.extent());
  std::transform(p.data().begin(), p.data().end(), out.data().begin(),
                 [](float v) { return static_cast<std::uint8_t>(v > 0.0f ? 1 : 0); });
  return out;
}

ProbabilityMap to_probability(const BinaryMap& b) {
  ProbabilityMap out(b.extent());
  std::transform(b.data().begin(), b.data().end(), out.data().begin(),
                 [](std::uint8_t v) { return v ? 1.0f : 0.0f; });
  return out;
}

BinaryMap threshold_binary(const ProbabilityMap& p, double t) {
  BinaryMap out(p.extent());
  // Compare at map precision so a pixel stored as float(t) passes.
  const float tf = static_cast<float>(t);
  std::transform(p.data().begin(), p.data().end(), out.data().begin(),
                 [tf](float v) { return static_cast<std::uint8_t>(v >= tf ? 1 : 0); });
  return out;
}

ProbabilityMap threshold_keep(const ProbabilityMap& p, double t) {
  ProbabilityMap out(p.extent());
  const float tf = static_cast<float>(t);
  std::transform(p.data().begin(), p.data().end(), out.data().begin(),
                 [tf](float v) { return v >= tf ? v : 0.0f; });
  return out;
}

ProbabilityMap apply_threshold(const ProbabilityMap& p, const ThresholdConfig& cfg) {
  if (cfg.mode == ThresholdMode::binary) return to_probability(threshold_binary(p, cfg.threshold));
  return threshold_keep(p, cfg.threshold);
}

std::vector<Pixel> disk_offsets(double radius) {
  std::vector<Pixel> offsets;
  if (!(radius >= 0.0)) return offsets;
  const int r = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r2) offsets.push_back({dx, dy});
  std::stable_sort(offsets.begin(), offsets.end(), [](Pixel a, Pixel b) {
    return a.x * a.x + a.y * a.y < b.x * b.x + b.y * b.y;
  });
  return offsets;
}

BinaryMap dilate_disk(std::span<const Pixel> points, double radius, Extent canvas) {
  if (radius < 0.0) throw Error(ErrorCode::InvalidArgument, "negative disk radius");
  BinaryMap out(canvas);
  const auto offsets = disk_offsets(radius);
  for (const Pixel p : points) {
    for (const Pixel o : offsets) {
      const Pixel q{p.x + o.x, p.y + o.y};
      if (canvas.contains(q)) out[q] = 1;
    }
  }
  return out;
}

}  // namespace obkit
