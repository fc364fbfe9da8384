#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "obkit/interaction.hpp"

namespace obkit::interact {
namespace {

constexpr int kTangentSpan = 5;
constexpr double kMaxCoordinate = 1e6;

// Pixels continuing the segment past `end` along the direction from `back` to `end`.
std::vector<Pixel> extension(Pixel back, Pixel end, std::int64_t count) {
  std::vector<Pixel> out;
  const int dx = end.x - back.x, dy = end.y - back.y;
  const int steps = std::max(std::abs(dx), std::abs(dy));
  if (steps == 0) return out;
  for (std::int64_t i = 1; i <= count; ++i) {
    const double s = static_cast<double>(i) / steps;
    out.push_back({end.x + static_cast<int>(std::lround(s * dx)), end.y + static_cast<int>(std::lround(s * dy))});
  }
  return out;
}

Pixel parse_point(const nlohmann::json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw Error(ErrorCode::ParseError, "stroke point must be [x, y]");
  }
  const double x = p[0].get<double>(), y = p[1].get<double>();
  if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > kMaxCoordinate || std::abs(y) > kMaxCoordinate) {
    throw Error(ErrorCode::ParseError, "stroke point out of range");
  }
  return {static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y))};
}

}  // namespace

FnFpMap::FnFpMap(BinaryMap fn_channel, BinaryMap fp_channel) : fn(std::move(fn_channel)), fp(std::move(fp_channel)) {
  require_same_extent(fn, fp, "fn and fp channels differ in size");
}

bool FnFpMap::empty() const { return count_on(fn) == 0 && count_on(fp) == 0; }

std::vector<Pixel> perturb_segment(const BoundarySegment& seg, const ScribbleConfig& cfg, Rng& rng, Extent canvas) {
  cfg.validate();
  std::vector<Pixel> pts = seg.points;
  if (pts.empty()) return {};
  const auto len = static_cast<std::int64_t>(pts.size());
  const auto k = static_cast<std::int64_t>(std::ceil(cfg.length_perturbation_fraction * static_cast<double>(len)));
  const std::int64_t d_start = rng.uniform_int(-k, k);
  const std::int64_t d_end = rng.uniform_int(-k, k);

  // Trims first, never below one pixel; the end is trimmed before the start.
  std::int64_t trim_end = d_end < 0 ? std::min(-d_end, len - 1) : 0;
  std::int64_t trim_start = d_start < 0 ? std::min(-d_start, len - 1 - trim_end) : 0;
  pts.erase(pts.end() - trim_end, pts.end());
  pts.erase(pts.begin(), pts.begin() + trim_start);

  if (d_start > 0 || d_end > 0) {
    const auto n = static_cast<std::int64_t>(pts.size());
    const std::int64_t back = std::min<std::int64_t>(n - 1, kTangentSpan);
    std::vector<Pixel> head, tail;
    if (d_start > 0) head = extension(pts[back], pts.front(), d_start);
    if (d_end > 0) tail = extension(pts[n - 1 - back], pts.back(), d_end);
    std::reverse(head.begin(), head.end());
    pts.insert(pts.begin(), head.begin(), head.end());
    pts.insert(pts.end(), tail.begin(), tail.end());
  }

  const int m = cfg.max_position_perturbation;
  std::vector<Pixel> out;
  out.reserve(pts.size());
  for (const Pixel p : pts) {
    const int dx = static_cast<int>(rng.uniform_int(-m, m));
    const int dy = static_cast<int>(rng.uniform_int(-m, m));
    const Pixel q{p.x + dx, p.y + dy};
    if (canvas.contains(q)) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FnFpMap simulate_scribbles(const std::vector<BoundarySegment>& fn_segs, const std::vector<BoundarySegment>& fp_segs,
                           const ScribbleConfig& cfg, Extent canvas) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  auto collect = [&](const std::vector<BoundarySegment>& segs) {
    std::vector<Pixel> all;
    for (const auto& s : segs) {
      const auto p = perturb_segment(s, cfg, rng, canvas);
      all.insert(all.end(), p.begin(), p.end());
    }
    return all;
  };
  const auto fn_pixels = collect(fn_segs);
  const auto fp_pixels = collect(fp_segs);
  return {dilate_disk(fn_pixels, cfg.disk_radius, canvas), dilate_disk(fp_pixels, cfg.disk_radius, canvas)};
}

std::vector<Pixel> line_pixels(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
  int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  Pixel p = a;
  for (;;) {
    out.push_back(p);
    if (p == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.y += sy;
    }
  }
  return out;
}

std::vector<Pixel> stroke_pixels(const Stroke& stroke) {
  std::vector<Pixel> out;
  if (stroke.points.empty()) return out;
  out.push_back(stroke.points.front());
  for (std::size_t i = 1; i < stroke.points.size(); ++i) {
    const auto seg = line_pixels(stroke.points[i - 1], stroke.points[i]);
    out.insert(out.end(), seg.begin() + 1, seg.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FnFpMap rasterize(const ScribbleDocument& doc, Extent canvas) {
  FnFpMap out(canvas);
  for (const Stroke& s : doc.strokes) {
    const BinaryMap disk = dilate_disk(stroke_pixels(s), s.radius, canvas);
    BinaryMap& target = s.channel == Channel::fn ? out.fn : out.fp;
    for (std::size_t i = 0; i < disk.size(); ++i) target.data()[i] |= disk.data()[i];
  }
  return out;
}

ScribbleDocument parse_scribble_document(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("scribble document: ") + e.what());
  }
  if (!j.is_object() || !j.contains("strokes") || !j["strokes"].is_array()) {
    throw Error(ErrorCode::ParseError, "scribble document needs a \"strokes\" array");
  }
  ScribbleDocument doc;
  for (const auto& s : j["strokes"]) {
    if (!s.is_object()) throw Error(ErrorCode::ParseError, "stroke must be an object");
    Stroke stroke;
    const auto ch = s.find("channel");
    if (ch == s.end() || !ch->is_string()) throw Error(ErrorCode::ParseError, "stroke channel missing");
    if (*ch == "fn") {
      stroke.channel = Channel::fn;
    } else if (*ch == "fp") {
      stroke.channel = Channel::fp;
    } else {
      throw Error(ErrorCode::ParseError, "stroke channel must be \"fn\" or \"fp\"");
    }
    const auto pts = s.find("points");
    if (pts == s.end() || !pts->is_array() || pts->empty()) throw Error(ErrorCode::ParseError, "stroke needs points");
    for (const auto& p : *pts) stroke.points.push_back(parse_point(p));
    if (const auto r = s.find("radius"); r != s.end()) {
      if (!r->is_number()) throw Error(ErrorCode::ParseError, "stroke radius must be a number");
      stroke.radius = r->get<double>();
      if (!std::isfinite(stroke.radius) || stroke.radius < 0.0 || stroke.radius > 4096.0) {
        throw Error(ErrorCode::ParseError, "stroke radius out of range");
      }
    }
    doc.strokes.push_back(std::move(stroke));
  }
  return doc;
}

std::string format_scribble_document(const ScribbleDocument& doc) {
  nlohmann::json strokes = nlohmann::json::array();
  for (const Stroke& s : doc.strokes) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Pixel p : s.points) pts.push_back({p.x, p.y});
    strokes.push_back({{"channel", s.channel == Channel::fn ? "fn" : "fp"}, {"points", pts}, {"radius", s.radius}});
  }
  return nlohmann::json{{"strokes", strokes}}.dump();
}

}  // namespace obkit::interact
