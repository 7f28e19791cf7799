#pragma once

#include "wabe/avatar/rig.hpp"
#include "wabe/core/types.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace wabe {

/// A timeline pose is either a name from the rig's pose table or inline.
using PoseRef = std::variant<std::string, RigidPose>;

struct TimelineEntry {
  double time = 0.0;
  std::vector<double> expression_weights;
  PoseRef pose = RigidPose{};
};

/// Everything a scene file carries: rig, splats, cameras and timeline.
struct Scene {
  AvatarRig rig;
  std::map<std::string, RigidPose> poses;
  std::vector<Gaussian3D> gaussians;
  std::vector<Camera> cameras;
  std::vector<TimelineEntry> timeline;

  /// Validates rig, cross references and value ranges. Throws wabe::Error.
  void validate() const;

  /// Number of animation frames; an empty timeline counts as one rest frame.
  std::size_t frame_count() const { return timeline.empty() ? 1 : timeline.size(); }

  RigidPose resolve_pose(const PoseRef& ref) const;

  /// Triangle frames of the rig animated to timeline frame `frame`.
  std::vector<TriangleFrame> frames_at(std::size_t frame) const;

  /// Gaussians bound to the rig at timeline frame `frame`.
  std::vector<WorldGaussian> world_gaussians_at(std::size_t frame) const;
  std::vector<WorldGaussian> world_gaussians_at(std::size_t frame,
                                                std::span<const Gaussian3D> gaussians) const;
};

}  // namespace wabe
