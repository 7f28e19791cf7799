#include "wabe/rasterizer/projection.hpp"

#include "wabe/core/math.hpp"

#include <cmath>

namespace wabe {
namespace {

Mat23 perspective_jacobian(const Vec3& t, const Camera& camera) {
  const double inv_z = 1.0 / t.z();
  const double inv_z2 = inv_z * inv_z;
  Mat23 j;
  j << camera.fx * inv_z, 0.0, -camera.fx * t.x() * inv_z2,
       0.0, camera.fy * inv_z, -camera.fy * t.y() * inv_z2;
  return j;
}

}  // namespace

void finalize_splat(Splat2D& s) {
  s.inv_cov2d = s.cov2d.inverse();
  // alpha >= kAlphaMin needs Mahalanobis^2 <= 2 ln(255 * peak); the
  // axis-aligned half extents of that ellipse are sqrt(m2 * cov_ii).
  const double level = 255.0 * s.peak_opacity;
  const double m2 = level > 1.0 ? 2.0 * std::log(level) : 0.0;
  s.extent_x = std::sqrt(m2 * s.cov2d(0, 0));
  s.extent_y = std::sqrt(m2 * s.cov2d(1, 1));
}

std::optional<Splat2D> project_unculled(const WorldGaussian& gaussian, const Camera& camera,
                                        int source_index) {
  const Vec3 t = camera.to_view(gaussian.position);
  if (!(t.z() > 0.0)) return std::nullopt;

  const Mat3 sigma_world = assemble_covariance(gaussian.rotation, gaussian.log_scale);
  const Mat3 sigma_view = camera.rotation * sigma_world * camera.rotation.transpose();
  const Mat23 j = perspective_jacobian(t, camera);

  Splat2D s;
  s.view_position = t;
  s.depth = t.z();
  s.mean2d = Vec2(camera.fx * t.x() / t.z() + camera.cx, camera.fy * t.y() / t.z() + camera.cy);
  s.cov2d = j * sigma_view * j.transpose();
  s.cov2d(1, 0) = s.cov2d(0, 1);
  s.cov2d += kScreenBlur * Mat2::Identity();
  s.peak_opacity = activate_opacity(gaussian.opacity_logit);
  s.color = gaussian.color;
  s.source_index = source_index;
  finalize_splat(s);
  return s;
}

std::optional<Splat2D> project(const WorldGaussian& gaussian, const Camera& camera,
                               int source_index) {
  const Vec3 t = camera.to_view(gaussian.position);
  if (!(t.z() > kNearPlane)) return std::nullopt;

  auto s = project_unculled(gaussian, camera, source_index);
  if (!s) return std::nullopt;

  const Mat2 unblurred = s->cov2d - kScreenBlur * Mat2::Identity();
  if (unblurred.determinant() < kDegenerateDeterminant) return std::nullopt;
  if (255.0 * s->peak_opacity <= 1.0) return std::nullopt;

  const double max_x = static_cast<double>(camera.width - 1);
  const double max_y = static_cast<double>(camera.height - 1);
  if (s->mean2d.x() + s->extent_x < 0.0 || s->mean2d.x() - s->extent_x > max_x ||
      s->mean2d.y() + s->extent_y < 0.0 || s->mean2d.y() - s->extent_y > max_y) {
    return std::nullopt;
  }
  return s;
}

std::vector<Splat2D> project_all(std::span<const WorldGaussian> gaussians, const Camera& camera) {
  std::vector<Splat2D> splats;
  splats.reserve(gaussians.size());
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    if (auto s = project(gaussians[i], camera, static_cast<int>(i))) splats.push_back(*s);
  }
  return splats;
}

double alpha_at(const Splat2D& splat, const Vec2& pixel) {
  const Vec2 d = pixel - splat.mean2d;
  const double power = -0.5 * d.dot(splat.inv_cov2d * d);
  const double alpha = splat.peak_opacity * std::exp(power);
  return alpha > kAlphaMax ? kAlphaMax : alpha;
}

}  // namespace wabe
