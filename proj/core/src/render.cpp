#include <array>

#include "obkit/geometry.hpp"
#include "obkit/parallel.hpp"

namespace obkit::geom {

Raster<float> GBuffer::depth_map() const {
  Raster<float> depth(extent_);
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (const auto& h = at(x, y)) depth(x, y) = static_cast<float>(h->depth);
  return depth;
}

GBuffer render_gbuffer(const Bvh& accel, const PinholeCamera& cam, int supersample, unsigned jobs) {
  cam.validate();
  if (supersample != 1 && supersample != 2) {
    throw Error(ErrorCode::InvalidArgument, "supersample must be 1 or 2");
  }
  GBuffer gbuf(cam.extent());
  if (accel.mesh().empty()) return gbuf;

  std::vector<Eigen::Vector2d> jitters;
  if (supersample == 1) {
    jitters = {{0.5, 0.5}};
  } else {
    jitters = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  }

  parallel_for(static_cast<std::size_t>(cam.height), jobs, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < cam.width; ++x) {
      std::optional<Hit> best;
      for (const auto& j : jitters) {
        auto hit = accel.cast(pixel_ray(cam, x, y, j));
        if (!hit) continue;
        hit->depth = cam.to_camera(hit->point).z();
        if (!best || hit->depth < best->depth ||
            (hit->depth == best->depth && hit->triangle < best->triangle)) {
          best = std::move(hit);
        }
      }
      gbuf.at(x, y) = std::move(best);
    }
  });
  return gbuf;
}

}  // namespace obkit::geom
