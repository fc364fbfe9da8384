#include "obkit/raster_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace obkit::io {
namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

const std::vector<int> kPngParams = {cv::IMWRITE_PNG_COMPRESSION, 6};

Bytes encode_png(const cv::Mat& mat) {
  std::vector<uchar> buf;
  if (!cv::imencode(".png", mat, buf, kPngParams)) {
    throw Error(ErrorCode::IoError, "png encoding failed");
  }
  return Bytes(buf.begin(), buf.end());
}

cv::Mat decode(std::span<const std::uint8_t> bytes, int flags) {
  if (bytes.empty()) throw Error(ErrorCode::ParseError, "empty image data");
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat img = cv::imdecode(raw, flags);
  if (img.empty()) throw Error(ErrorCode::ParseError, "undecodable image data");
  return img;
}

Raster<std::uint8_t> gray_from_mat(const cv::Mat& img) {
  cv::Mat gray = img;
  if (img.depth() != CV_8U) throw Error(ErrorCode::ParseError, "expected an 8-bit image");
  if (img.channels() == 3) cv::cvtColor(img, gray, cv::COLOR_BGR2GRAY);
  if (img.channels() == 4) cv::cvtColor(img, gray, cv::COLOR_BGRA2GRAY);
  Raster<std::uint8_t> out(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y)
    std::memcpy(out.row(y).data(), gray.ptr<std::uint8_t>(y), static_cast<std::size_t>(gray.cols));
  return out;
}

cv::Mat mat_from_gray(const Raster<std::uint8_t>& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y)
    std::memcpy(mat.ptr<std::uint8_t>(y), img.row(y).data(), static_cast<std::size_t>(img.width()));
  return mat;
}

}  // namespace

Bytes encode_float_map(const Raster<float>& map) {
  Bytes out(std::begin(kFloatMapMagic), std::end(kFloatMapMagic));
  out.reserve(16 + 4 * map.size());
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  for (const float v : map.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Raster<float> decode_float_map(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kFloatMapMagic, 8) != 0) {
    throw Error(ErrorCode::ParseError, "not an OBFMAP01 float map");
  }
  const std::uint32_t w = get_u32(bytes, 8), h = get_u32(bytes, 12);
  if (w > (1u << 20) || h > (1u << 20)) throw Error(ErrorCode::ParseError, "float map too large");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 16 + 4 * n) throw Error(ErrorCode::ParseError, "float map size mismatch");
  Raster<float> map(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < n; ++i) map.data()[i] = std::bit_cast<float>(get_u32(bytes, 16 + 4 * i));
  return map;
}

void write_float_map(const std::filesystem::path& path, const Raster<float>& map) {
  write_file(path, encode_float_map(map));
}

Raster<float> read_float_map(const std::filesystem::path& path) {
  try {
    return decode_float_map(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

Bytes encode_mask(const BinaryMap& mask) {
  Raster<std::uint8_t> img(mask.extent());
  for (std::size_t i = 0; i < mask.size(); ++i) img.data()[i] = mask.data()[i] ? 255 : 0;
  return encode_png(mat_from_gray(img));
}

BinaryMap decode_mask(std::span<const std::uint8_t> bytes) {
  Raster<std::uint8_t> img = gray_from_mat(decode(bytes, cv::IMREAD_UNCHANGED));
  BinaryMap out(img.extent());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint8_t v = img.data()[i];
    if (v != 0 && v != 255) throw Error(ErrorCode::ParseError, "mask value outside {0,255}");
    out.data()[i] = v ? 1 : 0;
  }
  return out;
}

void write_mask(const std::filesystem::path& path, const BinaryMap& mask) {
  write_file(path, encode_mask(mask));
}

BinaryMap read_mask(const std::filesystem::path& path) {
  try {
    return decode_mask(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

void write_gray(const std::filesystem::path& path, const Raster<std::uint8_t>& img) {
  write_file(path, encode_png(mat_from_gray(img)));
}

Raster<std::uint8_t> read_gray(const std::filesystem::path& path) {
  return gray_from_mat(decode(read_file(path), cv::IMREAD_UNCHANGED));
}

RgbImage decode_rgb(std::span<const std::uint8_t> bytes) {
  cv::Mat img = decode(bytes, cv::IMREAD_COLOR);
  RgbImage out(img.cols, img.rows);
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.cols; ++x) out(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

RgbImage read_rgb(const std::filesystem::path& path) {
  try {
    return decode_rgb(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

Bytes encode_rgb_png(const RgbImage& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb8 c = img(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  return encode_png(mat);
}

void write_rgb(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_rgb_png(img));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, path.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const std::filesystem::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

}  // namespace obkit::io
