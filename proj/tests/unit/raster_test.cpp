#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "obkit/raster.hpp"
#include "support.hpp"

namespace obkit {
namespace {

BinaryMap from_rows(const std::vector<std::string>& rows) {
  BinaryMap m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m(x, y) = rows[y][x] == '#' ? 1 : 0;
  return m;
}

bool connected8(const BinaryMap& b, std::size_t& components) {
  BinaryMap seen(b.extent());
  components = 0;
  for (const Pixel start : on_pixels(b)) {
    if (seen[start]) continue;
    ++components;
    std::vector<Pixel> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const Pixel p = stack.back();
      stack.pop_back();
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Pixel q{p.x + dx, p.y + dy};
          if (b.extent().contains(q) && b[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
    }
  }
  return true;
}

TEST(Raster, RejectsNegativeSize) { EXPECT_THROW(BinaryMap(-1, 3), Error); }

TEST(Raster, ValidateProbability) {
  ProbabilityMap p(2, 2, 0.5f);
  EXPECT_NO_THROW(validate_probability(p));
  p(1, 1) = 1.5f;
  EXPECT_THROW(validate_probability(p), Error);
  p(1, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(validate_probability(p), Error);
}

TEST(Threshold, InclusiveBinary) {
  const ProbabilityMap p(4, 4, 0.7f);
  EXPECT_EQ(count_on(threshold_binary(p, 0.7)), 16u);
}

TEST(Threshold, NonBinaryKeepsValues) {
  ProbabilityMap p(3, 1);
  p(0, 0) = 0.2f;
  p(1, 0) = 0.7f;
  p(2, 0) = 0.9f;
  const auto out = threshold_keep(p, 0.7);
  EXPECT_EQ(out(0, 0), 0.0f);
  EXPECT_EQ(out(1, 0), 0.7f);
  EXPECT_EQ(out(2, 0), 0.9f);
}

TEST(Threshold, ZeroMapStaysZero) {
  const ProbabilityMap p(5, 5);
  EXPECT_EQ(count_on(threshold_binary(p, 0.3)), 0u);
  EXPECT_EQ(threshold_keep(p, 0.3), p);
}

TEST(Threshold, Monotone) {
  Rng rng(3);
  ProbabilityMap p(16, 16);
  for (auto& v : p.data()) v = static_cast<float>(rng.uniform01());
  for (double t1 = 0.0; t1 <= 1.0; t1 += 0.1)
    for (double t2 = t1; t2 <= 1.0; t2 += 0.1) {
      const auto a = threshold_binary(p, t1), b = threshold_binary(p, t2);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(b.data()[i], a.data()[i]);
    }
}

TEST(Threshold, ApplyBinaryYieldsZeroOne) {
  ProbabilityMap p(2, 1);
  p(0, 0) = 0.8f;
  p(1, 0) = 0.3f;
  const auto out = apply_threshold(p, {0.7, ThresholdMode::binary});
  EXPECT_EQ(out(0, 0), 1.0f);
  EXPECT_EQ(out(1, 0), 0.0f);
}

TEST(Nms, ZeroMap) {
  const ProbabilityMap p(9, 9);
  EXPECT_EQ(nms_thin(p), p);
}

TEST(Nms, IsolatedPixelSurvives) {
  ProbabilityMap p(9, 9);
  p(4, 4) = 0.4f;
  EXPECT_EQ(nms_thin(p)(4, 4), 0.4f);
}

TEST(Nms, BandKeepsCentreColumn) {
  ProbabilityMap p(9, 9);
  for (int y = 0; y < 9; ++y) {
    p(3, y) = 0.2f;
    p(4, y) = 0.9f;
    p(5, y) = 0.2f;
  }
  const auto out = nms_thin(p);
  for (int y = 0; y < 9; ++y) {
    EXPECT_EQ(out(3, y), 0.0f);
    EXPECT_EQ(out(4, y), 0.9f);
    EXPECT_EQ(out(5, y), 0.0f);
  }
}

TEST(Nms, NeverIncreasesValues) {
  Rng rng(8);
  ProbabilityMap p(20, 20);
  for (auto& v : p.data()) v = static_cast<float>(rng.uniform01());
  const auto out = nms_thin(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_TRUE(out.data()[i] == 0.0f || out.data()[i] == p.data()[i]);
  }
}

TEST(Nms, BinaryThinMapsPassUnchanged) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const BinaryMap b = testing::random_thin_map({32, 32}, rng, 3, 40);
    EXPECT_EQ(to_binary(nms_thin(to_probability(b))), b);
  }
}

TEST(Nms, DiagonalRidge) {
  ProbabilityMap p(12, 12);
  for (int i = 0; i < 12; ++i) {
    p(i, i) = 0.8f;
    if (i + 1 < 12) p(i + 1, i) = 0.3f;
    if (i > 0) p(i - 1, i) = 0.3f;
  }
  const auto out = nms_thin(p);
  for (int i = 1; i < 11; ++i) {
    EXPECT_EQ(out(i, i), 0.8f);
    EXPECT_EQ(out(i + 1, i), 0.0f);
  }
}

TEST(MorphThin, DiagonalUnchanged) {
  BinaryMap b(8, 8);
  for (int i = 0; i < 8; ++i) b(i, i) = 1;
  EXPECT_EQ(morph_thin(b), b);
}

TEST(MorphThin, CornerKept) {
  const auto b = from_rows({"#####", "#....", "#....", "#...."});
  EXPECT_EQ(morph_thin(b), b);
}

TEST(MorphThin, SolidBlock) {
  BinaryMap b(6, 6);
  for (int y = 1; y < 5; ++y)
    for (int x = 1; x < 5; ++x) b(x, y) = 1;
  const auto t = morph_thin(b);
  EXPECT_TRUE(is_thin(t));
  EXPECT_GT(count_on(t), 0u);
  std::size_t comps = 0;
  connected8(t, comps);
  EXPECT_EQ(comps, 1u);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LE(t.data()[i], b.data()[i]);
}

TEST(MorphThin, EmptyMap) {
  const BinaryMap b(7, 7);
  EXPECT_EQ(morph_thin(b), b);
}

TEST(MorphThin, IdempotentAndConnectivityPreserving) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    BinaryMap b(24, 24);
    for (auto& v : b.data()) v = rng.bernoulli(0.45) ? 1 : 0;
    const auto t = morph_thin(b);
    EXPECT_TRUE(is_thin(t));
    EXPECT_EQ(morph_thin(t), t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LE(t.data()[i], b.data()[i]);
  }
}

TEST(MorphThin, ThickLineKeepsComponents) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryMap b(30, 30);
    // Two separated thick strokes.
    const int y1 = static_cast<int>(rng.uniform_int(3, 10)), y2 = static_cast<int>(rng.uniform_int(18, 25));
    for (int x = 2; x < 28; ++x)
      for (int d = 0; d < 3; ++d) {
        b(x, y1 + d) = 1;
        b(x, y2 + d) = 1;
      }
    std::size_t comps = 0;
    connected8(morph_thin(b), comps);
    EXPECT_EQ(comps, 2u);
  }
}

TEST(TraceSegments, Run) {
  const auto segs = trace_segments(from_rows({".....", "#####", "....."}));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].length(), 5u);
}

TEST(TraceSegments, TShape) {
  const auto b = from_rows({"#######", "...#...", "...#...", "...#..."});
  const auto segs = trace_segments(b);
  ASSERT_EQ(segs.size(), 3u);
  std::size_t total = 0;
  for (const auto& s : segs) total += s.length();
  EXPECT_EQ(total, 10u);
  // The junction pixel belongs to exactly one segment; the other two end next to it.
  int touching = 0;
  for (const auto& s : segs)
    for (const Pixel p : {s.points.front(), s.points.back()})
      if (std::max(std::abs(p.x - 3), std::abs(p.y)) <= 1) ++touching;
  EXPECT_GE(touching, 3);
}

TEST(TraceSegments, Empty) { EXPECT_TRUE(trace_segments(BinaryMap(5, 5)).empty()); }

TEST(TraceSegments, RejectsBlock) {
  EXPECT_THROW(trace_segments(from_rows({"##.", "##.", "..."})), Error);
}

TEST(TraceSegments, ClosedLoop) {
  const auto segs = trace_segments(from_rows({".###.", "#...#", "#...#", ".###."}));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].length(), 10u);
}

TEST(TraceSegments, RoundTripAndAdjacency) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const BinaryMap b = testing::random_thin_map({32, 32}, rng, 4, 50);
    BinaryMap rebuilt(b.extent());
    for (const auto& s : trace_segments(b)) {
      ASSERT_GE(s.length(), 1u);
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        EXPECT_EQ(rebuilt[s.points[i]], 0) << "pixel in two segments";
        rebuilt[s.points[i]] = 1;
        if (i > 0) {
          const Pixel a = s.points[i - 1], c = s.points[i];
          EXPECT_NE(a, c);
          EXPECT_LE(std::max(std::abs(a.x - c.x), std::abs(a.y - c.y)), 1);
        }
      }
    }
    EXPECT_EQ(rebuilt, b);
  }
}

TEST(DilateDisk, Radius2Has13Pixels) {
  const std::vector<Pixel> pts{{5, 5}};
  EXPECT_EQ(count_on(dilate_disk(pts, 2.0, {11, 11})), 13u);
}

TEST(DilateDisk, EmptyAndZeroRadius) {
  EXPECT_EQ(count_on(dilate_disk({}, 3.0, {9, 9})), 0u);
  const std::vector<Pixel> pts{{4, 4}};
  const auto b = dilate_disk(pts, 0.0, {9, 9});
  EXPECT_EQ(count_on(b), 1u);
  EXPECT_EQ(b(4, 4), 1);
}

TEST(DilateDisk, OutsidePointsClip) {
  const std::vector<Pixel> pts{{-2, 5}};
  EXPECT_EQ(dilate_disk(pts, 3.0, {10, 10}), testing::brute_disk(pts, 3.0, {10, 10}));
}

TEST(DilateDisk, MatchesBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Pixel> pts;
    const int n = static_cast<int>(rng.uniform_int(0, 8));
    for (int i = 0; i < n; ++i)
      pts.push_back({static_cast<int>(rng.uniform_int(-3, 34)), static_cast<int>(rng.uniform_int(-3, 34))});
    const double r = rng.uniform01() * 9.0;
    EXPECT_EQ(dilate_disk(pts, r, {32, 32}), testing::brute_disk(pts, r, {32, 32}));
  }
}

TEST(DilateDisk, OffsetsSortedByDistance) {
  const auto offs = disk_offsets(4.0);
  for (std::size_t i = 1; i < offs.size(); ++i)
    EXPECT_LE(offs[i - 1].x * offs[i - 1].x + offs[i - 1].y * offs[i - 1].y,
              offs[i].x * offs[i].x + offs[i].y * offs[i].y);
}

}  // namespace
}  // namespace obkit
