#include "wabe/fixtures/fixtures.hpp"

#include "wabe/core/math.hpp"
#include "wabe/rasterizer/rasterizer.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace wabe {

Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
               double fov_y_degrees) {
  const Vec3 f = (target - eye).normalized();
  const Vec3 r0 = f.cross(up).normalized();
  const Vec3 r1 = f.cross(r0);
  Camera c;
  c.rotation.row(0) = r0.transpose();
  c.rotation.row(1) = r1.transpose();
  c.rotation.row(2) = f.transpose();
  c.translation = -(c.rotation * eye);
  c.width = width;
  c.height = height;
  const double half = 0.5 * fov_y_degrees * std::numbers::pi / 180.0;
  c.fy = 0.5 * height / std::tan(half);
  c.fx = c.fy;
  c.cx = 0.5 * (width - 1);
  c.cy = 0.5 * (height - 1);
  return c;
}

namespace {

// Quad in the plane z = depth spanning [-h, h]^2, as two triangles.
void add_quad(AvatarRig& rig, double half, double depth) {
  const int base = static_cast<int>(rig.base_vertices.size());
  rig.base_vertices.push_back({-half, -half, depth});
  rig.base_vertices.push_back({half, -half, depth});
  rig.base_vertices.push_back({half, half, depth});
  rig.base_vertices.push_back({-half, half, depth});
  rig.triangles.push_back({base, base + 1, base + 2});
  rig.triangles.push_back({base, base + 2, base + 3});
}

Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return normalized(Quat(n(rng), n(rng), n(rng), n(rng)));
}

// Which of a quad's two triangles contains (x, y) in its plane.
int quad_triangle(double x, double y, int first) { return y <= x ? first : first + 1; }

// Gaussian centred at a world point, bound to the rest-pose frame of `tri`.
Gaussian3D place(const std::vector<TriangleFrame>& rest, int tri,
                 const Vec3& position, const Quat& rotation, const Vec3& world_sigma,
                 double opacity, const Vec3& color) {
  WorldGaussian w;
  w.position = position;
  w.rotation = rotation;
  w.log_scale = world_sigma.array().log();
  w.opacity_logit = opacity_logit_from(opacity);
  w.color = color;
  return bind_to_local(w, rest[tri], tri);
}

std::vector<TriangleFrame> rest_frames(const AvatarRig& rig) {
  return triangle_frames(rig, rig.base_vertices);
}

}  // namespace

Scene two_layer_scene() {
  Scene s;
  add_quad(s.rig, 1.0, 0.0);
  add_quad(s.rig, 1.0, 1.0);
  const auto rest = rest_frames(s.rig);
  const Quat id = identity_quat();
  for (int iy = 0; iy < 3; ++iy) {
    for (int ix = 0; ix < 3; ++ix) {
      const double x = -0.5 + 0.5 * ix;
      const double y = -0.5 + 0.5 * iy;
      s.gaussians.push_back(place(rest, quad_triangle(x, y, 0), {x, y, 0.0}, id,
                                  {0.3, 0.3, 0.02}, 0.5, {0.9, 0.15, 0.1}));
      s.gaussians.push_back(place(rest, quad_triangle(x, y, 2), {x, y, 1.0}, id,
                                  {0.4, 0.4, 0.02}, 0.95, {0.1, 0.2, 0.9}));
    }
  }
  s.cameras.push_back(look_at({0.0, 0.0, -4.0}, {0.0, 0.0, 0.5}, {0.0, 1.0, 0.0}, 32, 32, 40.0));
  return s;
}

Scene random_scene(std::uint64_t seed, int count, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scene s;
  add_quad(s.rig, 1.0, 0.0);
  for (int i = 0; i < count; ++i) {
    Gaussian3D g;
    g.parent_triangle = static_cast<int>(rng() % 2);
    g.position_local = Vec3(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, u(rng) - 0.5);
    g.rotation_local = random_quat(rng);
    for (int k = 0; k < 3; ++k) g.log_scale[k] = -2.6 + 1.4 * u(rng);
    g.opacity_logit = -1.0 + 4.0 * u(rng);
    g.color = Vec3(u(rng), u(rng), u(rng));
    s.gaussians.push_back(g);
  }
  const double ax = 0.3 * (2.0 * u(rng) - 1.0);
  const double ay = 0.3 * (2.0 * u(rng) - 1.0);
  const Vec3 eye(3.2 * std::sin(ax), 3.2 * std::sin(ay), -3.2 * std::cos(ax) * std::cos(ay));
  s.cameras.push_back(look_at(eye, Vec3::Zero(), {0.0, 1.0, 0.0}, width, height, 45.0));
  return s;
}

std::vector<std::size_t> FlapFixture::back_gaussians() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    for (int t : back_triangles) {
      if (scene.gaussians[i].parent_triangle == t) out.push_back(i);
    }
  }
  return out;
}

FlapFixture flap_fixture() {
  FlapFixture f;
  Scene& s = f.scene;
  AvatarRig& rig = s.rig;
  // Back panel at z = 0.5, triangles 0 and 1.
  add_quad(rig, 1.0, 0.5);
  // Flap at z = 0 hinged along its top edge y = 1.1, triangles 2 and 3.
  rig.base_vertices.push_back({-1.2, -1.2, 0.0});  // 4 bottom left
  rig.base_vertices.push_back({1.2, -1.2, 0.0});   // 5 bottom right
  rig.base_vertices.push_back({1.2, 1.1, 0.0});    // 6 hinge right
  rig.base_vertices.push_back({-1.2, 1.1, 0.0});   // 7 hinge left
  rig.triangles.push_back({4, 5, 6});
  rig.triangles.push_back({4, 6, 7});
  // Opening swings the bottom edge up to the hinge height and toward the
  // camera, leaving the flap edge-on above the panel.
  std::vector<Vec3> open(rig.base_vertices.size(), Vec3::Zero());
  open[4] = Vec3(0.0, 2.3, -2.3);
  open[5] = Vec3(0.0, 2.3, -2.3);
  rig.blendshapes.push_back(open);
  f.back_triangles = {0, 1};
  f.flap_triangles = {2, 3};

  const auto rest = rest_frames(rig);
  const Quat id = identity_quat();
  const Vec3 back_color(0.2, 0.45, 0.8);
  const Vec3 flap_color(0.85, 0.75, 0.25);
  constexpr int kBackGrid = 6;
  for (int iy = 0; iy < kBackGrid; ++iy) {
    for (int ix = 0; ix < kBackGrid; ++ix) {
      const double x = -0.85 + 1.7 * ix / (kBackGrid - 1);
      const double y = -0.85 + 1.7 * iy / (kBackGrid - 1);
      s.gaussians.push_back(place(rest, quad_triangle(x, y, 0), {x, y, 0.5}, id,
                                  {0.2, 0.2, 0.02}, 0.9, back_color));
    }
  }
  // Flap layer is semi-transparent so standard blending still routes some
  // gradient to the panel behind it.
  constexpr int kFlapGrid = 6;
  for (int iy = 0; iy < kFlapGrid; ++iy) {
    for (int ix = 0; ix < kFlapGrid; ++ix) {
      const double x = -1.0 + 2.0 * ix / (kFlapGrid - 1);
      const double y = -1.0 + 1.9 * iy / (kFlapGrid - 1);
      const int tri = y <= (1.1 - -1.2) / (1.2 - -1.2) * (x + 1.2) - 1.2 ? 2 : 3;
      s.gaussians.push_back(place(rest, tri, {x, y, 0.0}, id, {0.24, 0.24, 0.02}, 0.6,
                                  flap_color));
    }
  }

  s.cameras.push_back(look_at({0.0, 0.0, -4.0}, {0.0, 0.0, 0.25}, {0.0, 1.0, 0.0}, 32, 32, 42.0));
  s.cameras.push_back(look_at({1.0, 0.3, -3.85}, {0.0, 0.0, 0.25}, {0.0, 1.0, 0.0}, 32, 32, 42.0));

  const double openness[8] = {0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0};
  for (std::size_t t = 0; t < 8; ++t) {
    s.timeline.push_back({static_cast<double>(t), {openness[t]}, RigidPose{}});
    (openness[t] == 0.0 ? f.occluded_frames : f.visible_frames).push_back(t);
  }
  return f;
}

TrainConfigFile flap_edit_config() {
  TrainConfigFile file;
  file.scene = "flap.json";
  file.config.seed = 1;
  file.config.editor.prompt_id = 4;
  file.config.editor.seed = 1;
  return file;
}

FitFixture fit_fixture(std::uint64_t seed) {
  FitFixture fx;
  Scene& gt = fx.ground_truth;
  add_quad(gt.rig, 1.0, 0.0);
  const auto rest = rest_frames(gt.rig);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  constexpr int kGrid = 14;  // 196 on the grid plus 4 extra
  auto pattern = [](double x, double y) {
    return Vec3(0.5 + 0.4 * std::sin(2.5 * x + 0.5), 0.5 + 0.4 * std::cos(2.0 * y - 0.3),
                0.5 + 0.35 * std::sin(1.7 * (x + y)));
  };
  auto add = [&](double x, double y) {
    const double angle = std::numbers::pi * u(rng);
    const Quat q(std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle));
    const Vec3 sigma(0.07 + 0.05 * u(rng), 0.07 + 0.05 * u(rng), 0.01);
    gt.gaussians.push_back(
        place(rest, quad_triangle(x, y, 0), {x, y, 0.0}, q, sigma, 0.85, pattern(x, y)));
  };
  for (int iy = 0; iy < kGrid; ++iy) {
    for (int ix = 0; ix < kGrid; ++ix) {
      add(-0.93 + 1.86 * ix / (kGrid - 1), -0.93 + 1.86 * iy / (kGrid - 1));
    }
  }
  for (int i = 0; i < 4; ++i) add(1.6 * u(rng) - 0.8, 1.6 * u(rng) - 0.8);

  const Vec3 target = Vec3::Zero();
  const Vec3 up(0.0, 1.0, 0.0);
  gt.cameras.push_back(look_at({0.0, 0.0, -3.4}, target, up, 64, 64, 40.0));
  gt.cameras.push_back(look_at({1.1, 0.0, -3.2}, target, up, 64, 64, 40.0));
  gt.cameras.push_back(look_at({-1.1, 0.3, -3.2}, target, up, 64, 64, 40.0));
  gt.cameras.push_back(look_at({0.0, -1.1, -3.2}, target, up, 64, 64, 40.0));

  for (std::size_t v = 0; v < gt.cameras.size(); ++v) {
    fx.targets.push_back({v, 0, render_frame(gt, v, 0, BlendMode::standard())});
  }

  fx.initial = gt;
  for (auto& g : fx.initial.gaussians) {
    g.position_local += 0.03 * Vec3(n(rng), n(rng), 0.2 * n(rng));
    g.log_scale += 0.15 * Vec3(n(rng), n(rng), n(rng));
    g.opacity_logit = 0.0;
    g.color = Vec3::Constant(0.5);
  }
  return fx;
}

}  // namespace wabe
