#include "wabe/avatar/scene.hpp"

#include "wabe/core/error.hpp"

#include <cmath>
#include <string>

namespace wabe {

void Scene::validate() const {
  rig.validate();
  for (const auto& [name, pose] : poses) {
    if (pose.rotation.norm() == 0.0) throw Error("pose '" + name + "' has a zero quaternion");
  }
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    const auto& g = gaussians[i];
    if (g.parent_triangle < 0 || static_cast<std::size_t>(g.parent_triangle) >= rig.triangle_count()) {
      throw Error("gaussian " + std::to_string(i) + " references triangle " +
                  std::to_string(g.parent_triangle) + " outside the rig");
    }
    if (g.rotation_local.norm() == 0.0) {
      throw Error("gaussian " + std::to_string(i) + " has a zero quaternion");
    }
  }
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    try {
      cameras[c].validate();
    } catch (const Error& e) {
      throw Error("camera " + std::to_string(c) + ": " + e.what());
    }
  }
  for (std::size_t t = 0; t < timeline.size(); ++t) {
    const auto& entry = timeline[t];
    if (entry.expression_weights.size() != rig.blendshape_count()) {
      throw Error("timeline entry " + std::to_string(t) + " has " +
                  std::to_string(entry.expression_weights.size()) +
                  " expression weights, rig has " + std::to_string(rig.blendshape_count()) +
                  " blendshapes");
    }
    if (const auto* name = std::get_if<std::string>(&entry.pose); name && !poses.contains(*name)) {
      throw Error("timeline entry " + std::to_string(t) + " references unknown pose '" + *name +
                  "'");
    }
  }
}

RigidPose Scene::resolve_pose(const PoseRef& ref) const {
  if (const auto* inline_pose = std::get_if<RigidPose>(&ref)) return *inline_pose;
  const auto& name = std::get<std::string>(ref);
  const auto it = poses.find(name);
  if (it == poses.end()) throw Error("unknown pose '" + name + "'");
  return it->second;
}

std::vector<TriangleFrame> Scene::frames_at(std::size_t frame) const {
  std::vector<Vec3> vertices;
  if (timeline.empty()) {
    const std::vector<double> rest(rig.blendshape_count(), 0.0);
    vertices = animate(rig, rest, rig.rigid_pose);
  } else {
    if (frame >= timeline.size()) {
      throw Error("timeline frame " + std::to_string(frame) + " out of range");
    }
    const auto& entry = timeline[frame];
    vertices = animate(rig, entry.expression_weights, resolve_pose(entry.pose));
  }
  return triangle_frames(rig, vertices);
}

std::vector<WorldGaussian> Scene::world_gaussians_at(std::size_t frame) const {
  return world_gaussians_at(frame, gaussians);
}

std::vector<WorldGaussian> Scene::world_gaussians_at(std::size_t frame,
                                                     std::span<const Gaussian3D> splats) const {
  const auto frames = frames_at(frame);
  return bind_all(splats, frames);
}

}  // namespace wabe
