#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wabe {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

/// Quaternion stored as (w, x, y, z). Not necessarily unit length; every
/// consumer normalizes before building a rotation.
using Quat = Eigen::Vector4d;

inline Quat identity_quat() { return Quat(1.0, 0.0, 0.0, 0.0); }

/// One splat in its parent triangle's local frame.
///
/// Scale is stored as log std-dev and opacity as a logit so the optimizer
/// works on unconstrained values. Color is post-activation RGB in [0, 1]
/// (degree-0 appearance only).
struct Gaussian3D {
  Vec3 position_local = Vec3::Zero();
  Quat rotation_local = identity_quat();
  Vec3 log_scale = Vec3::Zero();
  double opacity_logit = 0.0;
  Vec3 color = Vec3::Constant(0.5);
  int parent_triangle = 0;
};

/// A Gaussian after binding: world-space mean, rotation and log scale.
struct WorldGaussian {
  Vec3 position = Vec3::Zero();
  Quat rotation = identity_quat();
  Vec3 log_scale = Vec3::Zero();
  double opacity_logit = 0.0;
  Vec3 color = Vec3::Constant(0.5);
};

/// Gradient of a scalar with respect to every field of one Gaussian.
struct GaussianGrad {
  Vec3 position = Vec3::Zero();
  Vec4 rotation = Vec4::Zero();
  Vec3 log_scale = Vec3::Zero();
  double opacity_logit = 0.0;
  Vec3 color = Vec3::Zero();

  GaussianGrad& operator+=(const GaussianGrad& other);
  GaussianGrad& operator*=(double factor);
  bool all_finite() const;
};

/// Per-Gaussian parameter gradients, indexed like the Gaussian list.
struct GradBuffer {
  std::vector<GaussianGrad> entries;

  GradBuffer() = default;
  explicit GradBuffer(std::size_t count) : entries(count) {}

  std::size_t size() const { return entries.size(); }
  void zero();
  bool all_finite() const;
  GradBuffer& operator+=(const GradBuffer& other);
};

/// Parameters per Gaussian in the flat optimizer layout:
/// position(3) rotation(4) log_scale(3) opacity_logit(1) color(3).
inline constexpr std::size_t kParamsPerGaussian = 14;

std::vector<double> pack_parameters(std::span<const Gaussian3D> gaussians);
void unpack_parameters(std::span<const double> flat, std::span<Gaussian3D> gaussians);
std::vector<double> pack_gradients(const GradBuffer& grads);

/// FNV-1a over the bytes of `values`; used for cheap state fingerprints.
std::uint64_t fnv1a64(std::span<const double> values);

/// Pinhole camera. `rotation` and `translation` map world to view space;
/// the camera looks down +z and pixel (x, y) has its center at (x, y).
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int width = 1;
  int height = 1;

  /// Throws wabe::Error on non-positive focal lengths or image size.
  void validate() const;
  Vec3 to_view(const Vec3& world) const { return rotation * world + translation; }
};

}  // namespace wabe
