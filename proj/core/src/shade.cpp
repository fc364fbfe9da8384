#include <algorithm>
#include <cmath>

#include "obkit/obgen.hpp"

namespace obkit::gen {
namespace {

Rgb8 albedo(int instance) {
  // Golden-angle hue walk, fixed saturation and value.
  const double h = std::fmod(0.61803398875 * (instance + 1), 1.0) * 6.0;
  const int sector = static_cast<int>(h);
  const double f = h - sector;
  const double v = 230.0, p = 70.0, q = v - (v - p) * f, t = p + (v - p) * f;
  double r = v, g = t, b = p;
  switch (sector) {
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
    default: break;
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

}  // namespace

RgbImage shade(const geom::GBuffer& gbuffer, const geom::PinholeCamera& cam) {
  RgbImage out(gbuffer.extent());
  for (int y = 0; y < gbuffer.height(); ++y) {
    for (int x = 0; x < gbuffer.width(); ++x) {
      const auto& hit = gbuffer.at(x, y);
      if (!hit) continue;
      const geom::Ray ray = geom::pixel_ray(cam, x, y);
      const double c = 0.25 + 0.75 * std::abs(hit->normal.dot(ray.direction));
      const Rgb8 a = albedo(hit->instance);
      auto scale = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * c), 0L, 255L)); };
      out(x, y) = {scale(a.r), scale(a.g), scale(a.b)};
    }
  }
  return out;
}

}  // namespace obkit::gen
