#pragma once

#include "wabe/avatar/scene.hpp"
#include "wabe/io/config_io.hpp"
#include "wabe/trainer/trainer.hpp"

#include <cstdint>
#include <vector>

namespace wabe {

/// Pinhole camera at `eye` looking at `target`, world `up` pointing up in the
/// image. `fov_y_degrees` is the full vertical field of view.
Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
               double fov_y_degrees);

/// A semi-transparent red layer in front of an opaque blue one, one camera,
/// 32x32, no timeline.
Scene two_layer_scene();

/// `count` random Gaussians bound to a two-triangle rig, one camera.
Scene random_scene(std::uint64_t seed, int count, int width = 64, int height = 64);

/// A back panel behind a hinged front flap. The flap's single blendshape
/// swings it up and out of the way; the timeline alternates closed and open.
struct FlapFixture {
  Scene scene;
  std::vector<int> back_triangles;
  std::vector<int> flap_triangles;
  std::vector<std::size_t> occluded_frames;  // flap closed
  std::vector<std::size_t> visible_frames;   // flap open

  std::vector<std::size_t> back_gaussians() const;
};

FlapFixture flap_fixture();

/// Edit configuration for the flap: red recolor, 1000 iterations.
TrainConfigFile flap_edit_config();

/// Synthetic fitting problem: a 200-Gaussian ground truth on a two-triangle
/// rig, its renders from four 64x64 views, and a perturbed starting avatar.
struct FitFixture {
  Scene ground_truth;
  Scene initial;
  std::vector<FitTarget> targets;
};

FitFixture fit_fixture(std::uint64_t seed = 7);

}  // namespace wabe
