#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "obkit/error.hpp"

namespace obkit {

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  // Row-major order: y first, then x.
  friend std::strong_ordering operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

struct Extent {
  int width = 0;
  int height = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
  bool contains(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

/// Row-major single-channel raster.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : extent_{width, height}, data_(checked_area(width, height), fill) {}
  explicit Raster(Extent e, T fill = T{}) : Raster(e.width, e.height, fill) {}

  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  Extent extent() const { return extent_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return extent_.contains({x, y}); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](Pixel p) { return data_[index(p.x, p.y)]; }
  const T& operator[](Pixel p) const { return data_[index(p.x, p.y)]; }

  // Returns `outside` for coordinates off the raster.
  T at_or(int x, int y, T outside) const { return contains(x, y) ? (*this)(x, y) : outside; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::span<T> row(int y) { return std::span<T>(data_).subspan(index(0, y), extent_.width); }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(index(0, y), extent_.width);
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_area(int w, int h) {
    if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative raster dimensions");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) +
           static_cast<std::size_t>(x);
  }

  Extent extent_{};
  std::vector<T> data_;
};

/// Boundary probability per pixel, every value finite and in [0,1].
using ProbabilityMap = Raster<float>;
/// On/off raster stored as 0/1 bytes.
using BinaryMap = Raster<std::uint8_t>;

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};
using RgbImage = Raster<Rgb8>;

/// Ordered 8-connected pixel polyline.
struct BoundarySegment {
  std::vector<Pixel> points;

  std::size_t length() const { return points.size(); }
  friend bool operator==(const BoundarySegment&, const BoundarySegment&) = default;
};

enum class ThresholdMode { binary, non_binary };

struct ThresholdConfig {
  double threshold = 0.7;
  ThresholdMode mode = ThresholdMode::non_binary;
};

template <typename A, typename B>
void require_same_extent(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (a.extent() != b.extent()) throw Error(ErrorCode::DimensionMismatch, what);
}

// Throws InvalidArgument when a value is non-finite or outside [0,1].
void validate_probability(const ProbabilityMap& p);

std::size_t count_on(const BinaryMap& b);
std::vector<Pixel> on_pixels(const BinaryMap& b);
BinaryMap to_binary(const ProbabilityMap& p);  // on where p > 0
ProbabilityMap to_probability(const BinaryMap& b);

/// Along-gradient non-maximum suppression. Orientation comes from repeated
/// 3x3 difference kernels; the two neighbors one pixel away along the ridge
/// normal are bilinearly interpolated. A pixel survives when it is >= both;
/// plateaus wider than one pixel are left to morph_thin.
ProbabilityMap nms_thin(const ProbabilityMap& p);

/// Binary mode: 1 where p >= T. The result is returned as 0/1.
BinaryMap threshold_binary(const ProbabilityMap& p, double t);
/// Non-binary mode: values below T set to 0.
ProbabilityMap threshold_keep(const ProbabilityMap& p, double t);
/// Applies cfg as a probability map (binary mode yields 0.0 / 1.0).
ProbabilityMap apply_threshold(const ProbabilityMap& p, const ThresholdConfig& cfg);

bool is_thin(const BinaryMap& b);
/// Iterative boundary peeling down to a 1-px skeleton that keeps the
/// 8-connectivity of every component. Idempotent.
BinaryMap morph_thin(const BinaryMap& b);

/// Splits a thin map into simple paths broken at junctions. Segments
/// partition the on-pixels. Throws RejectNotThin on a 2x2 all-on block.
std::vector<BoundarySegment> trace_segments(const BinaryMap& b);

/// Marks every pixel within Euclidean distance `radius` of any point.
BinaryMap dilate_disk(std::span<const Pixel> points, double radius, Extent canvas);

/// Lattice offsets (dx,dy) with dx^2 + dy^2 <= radius^2, sorted by distance.
std::vector<Pixel> disk_offsets(double radius);

}  // namespace obkit
