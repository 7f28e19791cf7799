#include "wabe/avatar/rig.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/math.hpp"

#include <cmath>
#include <string>

namespace wabe {

Vec3 RigidPose::apply(const Vec3& p) const { return rotation_matrix(rotation) * p + translation; }

void AvatarRig::validate() const {
  const auto n = static_cast<int>(base_vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int idx : triangles[t]) {
      if (idx < 0 || idx >= n) {
        throw Error("triangle " + std::to_string(t) + " references vertex " + std::to_string(idx) +
                    " outside [0, " + std::to_string(n) + ")");
      }
    }
    const auto& tri = triangles[t];
    triangle_frame(base_vertices[tri[0]], base_vertices[tri[1]], base_vertices[tri[2]],
                   static_cast<int>(t));
  }
  for (std::size_t b = 0; b < blendshapes.size(); ++b) {
    if (blendshapes[b].size() != base_vertices.size()) {
      throw Error("blendshape " + std::to_string(b) + " has " +
                  std::to_string(blendshapes[b].size()) + " deltas for " + std::to_string(n) +
                  " vertices");
    }
  }
  if (rigid_pose.rotation.norm() == 0.0) throw Error("rig rigid_pose has a zero quaternion");
}

std::vector<Vec3> animate(const AvatarRig& rig, std::span<const double> expression_weights,
                          const RigidPose& pose) {
  if (expression_weights.size() != rig.blendshapes.size()) {
    throw Error("expected " + std::to_string(rig.blendshapes.size()) +
                " expression weights, got " + std::to_string(expression_weights.size()));
  }
  for (std::size_t b = 0; b < expression_weights.size(); ++b) {
    const double w = expression_weights[b];
    if (!std::isfinite(w) || std::abs(w) > kMaxExpressionWeight) {
      throw Error("expression weight " + std::to_string(b) + " out of range: " +
                  std::to_string(w));
    }
  }

  std::vector<Vec3> vertices = rig.base_vertices;
  for (std::size_t b = 0; b < rig.blendshapes.size(); ++b) {
    const double w = expression_weights[b];
    if (w == 0.0) continue;
    for (std::size_t v = 0; v < vertices.size(); ++v) vertices[v] += w * rig.blendshapes[b][v];
  }
  if (pose == RigidPose::identity()) return vertices;

  const Mat3 r = rotation_matrix(pose.rotation);
  for (auto& v : vertices) v = r * v + pose.translation;
  return vertices;
}

TriangleFrame triangle_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2, int triangle_index) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 n = e1.cross(e2);
  const double area = 0.5 * n.norm();
  if (!(area > kMinTriangleArea)) {
    std::string name = triangle_index >= 0 ? "triangle " + std::to_string(triangle_index)
                                           : std::string("triangle");
    throw Error(name + " is degenerate (area " + std::to_string(area) + ")");
  }

  TriangleFrame f;
  f.origin = (v0 + v1 + v2) / 3.0;
  const Vec3 c0 = e1.normalized();
  const Vec3 c2 = n.normalized();
  f.rotation.col(0) = c0;
  f.rotation.col(1) = c2.cross(c0);
  f.rotation.col(2) = c2;
  f.scale = std::sqrt(area);
  return f;
}

std::vector<TriangleFrame> triangle_frames(const AvatarRig& rig, std::span<const Vec3> vertices) {
  std::vector<TriangleFrame> frames;
  frames.reserve(rig.triangles.size());
  for (std::size_t t = 0; t < rig.triangles.size(); ++t) {
    const auto& tri = rig.triangles[t];
    frames.push_back(
        triangle_frame(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]], static_cast<int>(t)));
  }
  return frames;
}

WorldGaussian bind_to_world(const Gaussian3D& g, const TriangleFrame& frame) {
  WorldGaussian w;
  w.position = frame.origin + frame.scale * (frame.rotation * g.position_local);
  w.rotation = quat_multiply(quat_from_matrix(frame.rotation), g.rotation_local);
  w.log_scale = g.log_scale + Vec3::Constant(std::log(frame.scale));
  w.opacity_logit = g.opacity_logit;
  w.color = g.color;
  return w;
}

Gaussian3D bind_to_local(const WorldGaussian& w, const TriangleFrame& frame, int parent_triangle) {
  Gaussian3D g;
  g.position_local = frame.rotation.transpose() * (w.position - frame.origin) / frame.scale;
  const Quat qf = quat_from_matrix(frame.rotation);
  const Quat qf_inv(qf[0], -qf[1], -qf[2], -qf[3]);
  g.rotation_local = quat_multiply(qf_inv, normalized(w.rotation));
  g.log_scale = w.log_scale - Vec3::Constant(std::log(frame.scale));
  g.opacity_logit = w.opacity_logit;
  g.color = w.color;
  g.parent_triangle = parent_triangle;
  return g;
}

std::vector<WorldGaussian> bind_all(std::span<const Gaussian3D> gaussians,
                                    std::span<const TriangleFrame> frames) {
  std::vector<WorldGaussian> world;
  world.reserve(gaussians.size());
  for (const auto& g : gaussians) {
    if (g.parent_triangle < 0 || static_cast<std::size_t>(g.parent_triangle) >= frames.size()) {
      throw Error("Gaussian parent_triangle " + std::to_string(g.parent_triangle) +
                  " has no frame");
    }
    world.push_back(bind_to_world(g, frames[g.parent_triangle]));
  }
  return world;
}

GradBuffer pull_back_to_local(const GradBuffer& world_grads, std::span<const Gaussian3D> gaussians,
                              std::span<const TriangleFrame> frames) {
  if (world_grads.size() != gaussians.size()) {
    throw ContractViolation("gradient buffer does not match the Gaussian list");
  }
  GradBuffer local(gaussians.size());
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    const TriangleFrame& f = frames[gaussians[i].parent_triangle];
    const GaussianGrad& gw = world_grads.entries[i];
    GaussianGrad& gl = local.entries[i];
    gl.position = f.scale * (f.rotation.transpose() * gw.position);
    gl.rotation = quat_left_matrix(quat_from_matrix(f.rotation)).transpose() * gw.rotation;
    gl.log_scale = gw.log_scale;
    gl.opacity_logit = gw.opacity_logit;
    gl.color = gw.color;
  }
  return local;
}

}  // namespace wabe
