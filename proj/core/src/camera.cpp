#include <Eigen/Dense>
#include <cmath>

#include "obkit/geometry.hpp"

namespace obkit::geom {

void PinholeCamera::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidCamera, what); };
  if (!(fx > 0.0) || !(fy > 0.0)) fail("focal lengths must be positive");
  if (width <= 0 || height <= 0) fail("image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) fail("principal point outside the image");
  if (!rotation.allFinite() || !translation.allFinite()) fail("pose is not finite");
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6) fail("rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-6) fail("rotation determinant is not +1");
}

std::optional<Eigen::Vector2d> PinholeCamera::project(const Vec3& world) const {
  const Vec3 c = to_camera(world);
  if (!(c.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d(fx * c.x() / c.z() + cx, fy * c.y() / c.z() + cy);
}

Ray pixel_ray(const PinholeCamera& cam, int x, int y, Eigen::Vector2d jitter) {
  const double u = x + jitter.x(), v = y + jitter.y();
  const Vec3 dir_cam((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
  Ray ray;
  ray.origin = cam.center();
  ray.direction = (cam.rotation.transpose() * dir_cam).normalized();
  return ray;
}

}  // namespace obkit::geom
