#pragma once

#include "wabe/core/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace wabe {

inline constexpr double kMinTriangleArea = 1e-10;
/// Sanity bound on |expression weight|.
inline constexpr double kMaxExpressionWeight = 5.0;

struct RigidPose {
  Quat rotation = identity_quat();
  Vec3 translation = Vec3::Zero();

  static RigidPose identity() { return {}; }
  Vec3 apply(const Vec3& p) const;
  bool operator==(const RigidPose&) const = default;
};

/// Triangle mesh with linear blendshapes and one rigid joint.
struct AvatarRig {
  std::vector<Vec3> base_vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<Vec3>> blendshapes;  // B sets of per-vertex deltas
  RigidPose rigid_pose;

  std::size_t vertex_count() const { return base_vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::size_t blendshape_count() const { return blendshapes.size(); }

  /// Checks index ranges, blendshape sizes and base-mesh triangle areas.
  void validate() const;
};

/// Similarity frame attached to a triangle.
struct TriangleFrame {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();  // col 0 first edge, col 2 normal
  double scale = 1.0;                // sqrt(area)

  static TriangleFrame identity() { return {}; }
};

/// vertices = R_pose (base + sum_b w_b delta_b) + t_pose
std::vector<Vec3> animate(const AvatarRig& rig, std::span<const double> expression_weights,
                          const RigidPose& pose);

/// Throws wabe::Error naming `triangle_index` (when >= 0) for degenerate input.
TriangleFrame triangle_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                             int triangle_index = -1);

std::vector<TriangleFrame> triangle_frames(const AvatarRig& rig, std::span<const Vec3> vertices);

WorldGaussian bind_to_world(const Gaussian3D& gaussian, const TriangleFrame& frame);

/// Inverse of bind_to_world: expresses a world-space Gaussian in `frame`.
Gaussian3D bind_to_local(const WorldGaussian& world, const TriangleFrame& frame,
                         int parent_triangle);

std::vector<WorldGaussian> bind_all(std::span<const Gaussian3D> gaussians,
                                    std::span<const TriangleFrame> frames);

/// Chains world-space gradients back through bind_to_world to the local
/// parameters. Frames are constants.
GradBuffer pull_back_to_local(const GradBuffer& world_grads, std::span<const Gaussian3D> gaussians,
                              std::span<const TriangleFrame> frames);

}  // namespace wabe
