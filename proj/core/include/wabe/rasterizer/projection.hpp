#pragma once

#include "wabe/core/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wabe {

inline constexpr double kNearPlane = 0.01;
/// Isotropic screen-space blur added to every projected covariance (px^2).
inline constexpr double kScreenBlur = 0.3;
/// Projected covariances with determinant below this (before blur) are culled.
inline constexpr double kDegenerateDeterminant = 1e-12;
inline constexpr double kAlphaMax = 0.99;
inline constexpr double kAlphaMin = 1.0 / 255.0;

/// A Gaussian projected to screen space, ready for compositing.
struct Splat2D {
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Identity();
  Mat2 inv_cov2d = Mat2::Identity();
  double depth = 0.0;
  double peak_opacity = 0.0;
  Vec3 color = Vec3::Zero();
  int source_index = -1;

  // Half-extents of the screen box outside which alpha < kAlphaMin.
  double extent_x = 0.0;
  double extent_y = 0.0;
  Vec3 view_position = Vec3::Zero();
};

/// Fills inv_cov2d and the screen extents from cov2d and peak_opacity.
/// Useful when building splats by hand.
void finalize_splat(Splat2D& splat);

/// Projects without any culling decision other than requiring positive depth.
/// Used by the frozen-support forward of the gradient checker.
std::optional<Splat2D> project_unculled(const WorldGaussian& gaussian, const Camera& camera,
                                        int source_index);

/// Full projection: returns nullopt when the Gaussian is behind the near
/// plane, has a degenerate screen covariance, can never reach kAlphaMin, or
/// its footprint misses the viewport.
std::optional<Splat2D> project(const WorldGaussian& gaussian, const Camera& camera,
                               int source_index = 0);

/// Projects every Gaussian, dropping culled ones. source_index is the
/// position in `gaussians`.
std::vector<Splat2D> project_all(std::span<const WorldGaussian> gaussians, const Camera& camera);

/// Opacity of `splat` at a pixel center, clamped to kAlphaMax. Callers skip
/// contributions below kAlphaMin.
double alpha_at(const Splat2D& splat, const Vec2& pixel);

}  // namespace wabe
