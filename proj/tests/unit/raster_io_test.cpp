#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "obkit/raster_io.hpp"
#include "support.hpp"

namespace obkit {
namespace {

using testing::TempDir;

TEST(FloatMap, HeaderLayout) {
  Raster<float> m(3, 2, 0.25f);
  const auto bytes = io::encode_float_map(m);
  ASSERT_EQ(bytes.size(), 16u + 4u * 6u);
  EXPECT_EQ(std::memcmp(bytes.data(), "OBFMAP01", 8), 0);
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[9], 0);
  EXPECT_EQ(bytes[12], 2);
  // 0.25f = 0x3e800000, little-endian.
  EXPECT_EQ(bytes[16], 0x00);
  EXPECT_EQ(bytes[18], 0x80);
  EXPECT_EQ(bytes[19], 0x3e);
}

TEST(FloatMap, BitExactRoundTrip) {
  TempDir tmp;
  Raster<float> m(4, 3);
  const float values[] = {-0.0f, std::numeric_limits<float>::quiet_NaN(), std::numeric_limits<float>::infinity(),
                          std::numeric_limits<float>::denorm_min(), 1.0f, 0.3f};
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = values[i % 6];
  io::write_float_map(tmp / "a.obfmap", m);
  const auto back = io::read_float_map(tmp / "a.obfmap");
  ASSERT_EQ(back.extent(), m.extent());
  EXPECT_EQ(std::memcmp(back.data().data(), m.data().data(), m.size() * sizeof(float)), 0);
}

TEST(FloatMap, EmptyMap) {
  const Raster<float> m(0, 0);
  EXPECT_EQ(io::decode_float_map(io::encode_float_map(m)).extent(), (Extent{0, 0}));
}

TEST(FloatMap, RejectsBadMagicAndTruncation) {
  auto bytes = io::encode_float_map(Raster<float>(2, 2));
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(io::decode_float_map(truncated), Error);
  bytes[0] = 'X';
  EXPECT_THROW(io::decode_float_map(bytes), Error);
}

TEST(FloatMap, MissingFile) {
  try {
    io::read_float_map("/nonexistent/x.obfmap");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
  }
}

TEST(Mask, RoundTripAndEncoding) {
  TempDir tmp;
  BinaryMap m(9, 4);
  m(0, 0) = 1;
  m(8, 3) = 1;
  io::write_mask(tmp / "m.png", m);
  EXPECT_EQ(io::read_mask(tmp / "m.png"), m);
  const auto gray = io::read_gray(tmp / "m.png");
  EXPECT_EQ(gray(0, 0), 255);
  EXPECT_EQ(gray(1, 0), 0);
}

TEST(Mask, RejectsOtherValues) {
  TempDir tmp;
  Raster<std::uint8_t> g(2, 2);
  g(0, 0) = 128;
  io::write_gray(tmp / "g.png", g);
  try {
    io::read_mask(tmp / "g.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Rgb, RoundTrip) {
  TempDir tmp;
  RgbImage img(5, 3);
  img(1, 2) = {10, 200, 30};
  io::write_rgb(tmp / "c.png", img);
  EXPECT_EQ(io::read_rgb(tmp / "c.png"), img);
  EXPECT_EQ(io::decode_rgb(io::encode_rgb_png(img)), img);
}

TEST(Rgb, UndecodableBytes) {
  const std::vector<std::uint8_t> junk{1, 2, 3, 4};
  EXPECT_THROW(io::decode_rgb(junk), Error);
}

TEST(Files, AtomicWriteCreatesParents) {
  TempDir tmp;
  io::write_text(tmp / "a" / "b" / "c.txt", "hello");
  EXPECT_EQ(io::read_text(tmp / "a" / "b" / "c.txt"), "hello");
}

}  // namespace
}  // namespace obkit
