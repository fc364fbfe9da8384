#include <cmath>
#include <numbers>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit {
namespace {

using Field = Raster<double>;

// 3x3 difference kernels, normalized so a unit ramp has unit slope.
Field diff_x(const Field& f) {
  Field out(f.extent());
  const int w = f.width(), h = f.height();
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
      out(x, y) = ((f(xp, ym) - f(xm, ym)) + 2.0 * (f(xp, y) - f(xm, y)) +
                   (f(xp, yp) - f(xm, yp))) / 8.0;
    }
  }
  return out;
}

Field diff_y(const Field& f) {
  Field out(f.extent());
  const int w = f.width(), h = f.height();
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
      out(x, y) = ((f(xm, yp) - f(xm, ym)) + 2.0 * (f(x, yp) - f(x, ym)) +
                   (f(xp, yp) - f(xp, ym))) / 8.0;
    }
  }
  return out;
}

double bilinear(const ProbabilityMap& p, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const double ax = x - fx, ay = y - fy;
  const double v00 = p.at_or(x0, y0, 0.0f), v10 = p.at_or(x0 + 1, y0, 0.0f);
  const double v01 = p.at_or(x0, y0 + 1, 0.0f), v11 = p.at_or(x0 + 1, y0 + 1, 0.0f);
  return (1.0 - ay) * ((1.0 - ax) * v00 + ax * v10) + ay * ((1.0 - ax) * v01 + ax * v11);
}

}  // namespace

ProbabilityMap nms_thin(const ProbabilityMap& p) {
  ProbabilityMap out(p.extent());
  if (p.empty()) return out;

  Field f(p.extent());
  for (std::size_t i = 0; i < p.size(); ++i) f.data()[i] = p.data()[i];
  const Field ox = diff_x(f);
  const Field oy = diff_y(f);
  const Field oxx = diff_x(ox);
  const Field oxy = diff_y(ox);
  const Field oyy = diff_y(oy);

  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      const double v = p(x, y);
      if (v <= 0.0) continue;
      // The Hessian's largest eigenvalue points along the ridge; the ridge
      // normal is perpendicular to it.
      const double along = 0.5 * std::atan2(2.0 * oxy(x, y), oxx(x, y) - oyy(x, y));
      double normal = along + std::numbers::pi / 2.0;
      if (normal >= std::numbers::pi) normal -= std::numbers::pi;
      if (normal < 0.0) normal += std::numbers::pi;
      const double dx = std::cos(normal), dy = std::sin(normal);
      const double forward = bilinear(p, x + dx, y + dy);
      const double backward = bilinear(p, x - dx, y - dy);
      if (v >= forward && v >= backward) out(x, y) = p(x, y);
    }
  }
  return out;
}

}  // namespace obkit
