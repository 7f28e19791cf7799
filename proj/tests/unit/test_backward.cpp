#include "generators.hpp"

#include "wabe/autodiff/backward.hpp"
#include "wabe/autodiff/gradcheck.hpp"
#include "wabe/core/error.hpp"
#include "wabe/core/math.hpp"
#include "wabe/fixtures/fixtures.hpp"
#include "wabe/rasterizer/rasterizer.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wabe;
using testsupport::Gen;

namespace {

struct Case {
  bool wabe;
  WeightGradient policy;
};

BlendMode mode_of(const Case& c) { return c.wabe ? BlendMode::wabe(6.0) : BlendMode::standard(); }

}  // namespace

class GradcheckSweep : public ::testing::TestWithParam<Case> {};

TEST_P(GradcheckSweep, RandomScenesAgreeWithFiniteDifferences) {
  const Case c = GetParam();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Scene scene = random_scene(seed, 12, 40, 40);
    Gen gen(seed + 100);
    const SquaredErrorLoss loss(gen.image(40, 40));
    const auto report = gradcheck(scene.gaussians, scene.frames_at(0), scene.cameras[0],
                                  mode_of(c), {c.policy, AccumulateOrder::Deterministic, 0}, loss);
    EXPECT_LT(report.max_relative_error(), 1e-4) << report.to_text();
    EXPECT_EQ(report.parameters_checked, 12 * kParamsPerGaussian);
  }
}

INSTANTIATE_TEST_SUITE_P(ModesAndPolicies, GradcheckSweep,
                         ::testing::Values(Case{false, WeightGradient::Detached},
                                           Case{false, WeightGradient::Full},
                                           Case{true, WeightGradient::Detached},
                                           Case{true, WeightGradient::Full}));

TEST(Backward, ColorGradientOfLoneSplatIsAlphaMass) {
  // dL/dc = sum over pixels of g * alpha (T = 1, w = 1 for the only layer).
  WorldGaussian g;
  g.position = Vec3(0.05, -0.02, 2.0);
  g.log_scale = Vec3::Constant(std::log(0.05));
  g.opacity_logit = 0.3;
  Camera cam;
  cam.fx = cam.fy = 60;
  cam.cx = cam.cy = 15.5;
  cam.width = cam.height = 32;
  const std::vector<WorldGaussian> gs{g};
  const auto out = render_gaussians(gs, cam, BlendMode::wabe(6.0));
  ImageBuffer upstream(32, 32, 1.0);
  const auto grads = backward(out, upstream, BlendMode::wabe(6.0));
  double mass = 0.0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (const auto& r : out.contributions(x, y)) mass += r.alpha;
    }
  }
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(grads.entries[0].color[c], mass, 1e-12);
}

TEST(Backward, PerRecordColorRatioIsLayerWeight) {
  Gen gen(31);
  const auto gs = gen.world_gaussians(60);
  const Camera cam = gen.camera(32, 32);
  const BlendMode wabe = BlendMode::wabe(6.0);
  const auto out_w = render_gaussians(gs, cam, wabe);
  const auto out_s = render_gaussians(gs, cam, BlendMode::standard());
  int checked = 0;
  for (int y = 2; y < 32; y += 7) {
    for (int x = 3; x < 32; x += 7) {
      ImageBuffer upstream(32, 32);
      upstream.at(x, y, 1) = 1.0;
      const auto gw = backward_splats(out_w, upstream, wabe);
      const auto gs_ = backward_splats(out_s, upstream, BlendMode::standard());
      for (const auto& r : out_w.contributions(x, y)) {
        const double ratio = gw[r.splat].color[1] / gs_[r.splat].color[1];
        EXPECT_NEAR(ratio, wabe_weight(r.transmittance, 6.0), 1e-9);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Backward, PoliciesAgreeForStandardAndDifferForWabe) {
  Gen gen(32);
  const auto gs = gen.world_gaussians(40);
  const Camera cam = gen.camera(32, 32);
  const ImageBuffer upstream = gen.image(32, 32, -1.0, 1.0);
  const auto std_out = render_gaussians(gs, cam, BlendMode::standard());
  const auto a = pack_gradients(backward(std_out, upstream, BlendMode::standard(), {WeightGradient::Detached}));
  const auto b = pack_gradients(backward(std_out, upstream, BlendMode::standard(), {WeightGradient::Full}));
  EXPECT_EQ(a, b);

  const auto wabe_out = render_gaussians(gs, cam, BlendMode::wabe(6.0));
  const auto c = pack_gradients(backward(wabe_out, upstream, BlendMode::wabe(6.0), {WeightGradient::Detached}));
  const auto d = pack_gradients(backward(wabe_out, upstream, BlendMode::wabe(6.0), {WeightGradient::Full}));
  EXPECT_NE(c, d);
}

TEST(Backward, BitIdenticalAcrossThreadCounts) {
  Gen gen(33);
  const auto gs = gen.world_gaussians(80);
  const Camera cam = gen.camera(70, 45);
  const ImageBuffer upstream = gen.image(70, 45, -1.0, 1.0);
  const auto out = render_gaussians(gs, cam, BlendMode::wabe(6.0));
  const auto ref = pack_gradients(backward(out, upstream, BlendMode::wabe(6.0), {WeightGradient::Full, AccumulateOrder::Deterministic, 1}));
  for (int threads : {2, 5, 8}) {
    EXPECT_EQ(pack_gradients(backward(out, upstream, BlendMode::wabe(6.0),
                                      {WeightGradient::Full, AccumulateOrder::Deterministic, threads})),
              ref);
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  Gen gen(34);
  const auto gs = gen.world_gaussians(20);
  const Camera cam = gen.camera(24, 24);
  const auto out = render_gaussians(gs, cam, BlendMode::standard());
  for (double v : pack_gradients(backward(out, ImageBuffer(24, 24), BlendMode::standard()))) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Backward, ContractViolations) {
  Gen gen(35);
  const auto gs = gen.world_gaussians(5);
  const Camera cam = gen.camera(16, 16);
  const auto cached = render_gaussians(gs, cam, BlendMode::standard());
  const auto uncached = render_gaussians(gs, cam, BlendMode::standard(), {0, false});
  EXPECT_THROW(backward(uncached, ImageBuffer(16, 16), BlendMode::standard()), ContractViolation);
  EXPECT_THROW(backward(cached, ImageBuffer(16, 16), BlendMode::wabe(6.0)), ContractViolation);
  EXPECT_THROW(backward(cached, ImageBuffer(15, 16), BlendMode::standard()), ContractViolation);
}

TEST(Backward, NonFiniteUpstreamNamesPixel) {
  Gen gen(36);
  const auto gs = gen.world_gaussians(5);
  const Camera cam = gen.camera(16, 16);
  const auto out = render_gaussians(gs, cam, BlendMode::standard());
  ImageBuffer upstream(16, 16);
  upstream.at(7, 3, 2) = std::nan("");
  try {
    backward(out, upstream, BlendMode::standard());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(7, 3)"), std::string::npos) << e.what();
  }
}

TEST(Backward, MatchesPlainFiniteDifferencesAwayFromThresholds) {
  // One smooth, well-inside-the-image splat: no culling or clamping decision
  // is near a boundary, so the real renderer can be differenced directly.
  WorldGaussian g;
  g.position = Vec3(0.03, 0.01, 2.5);
  g.rotation = normalized(Quat(0.9, 0.1, 0.3, -0.2));
  g.log_scale = Vec3(std::log(0.08), std::log(0.05), std::log(0.06));
  g.opacity_logit = -0.5;
  g.color = Vec3(0.3, 0.6, 0.9);
  Camera cam;
  cam.fx = cam.fy = 80;
  cam.cx = cam.cy = 23.5;
  cam.width = cam.height = 48;
  Gen gen(37);
  const ImageBuffer target = gen.image(48, 48);
  const SquaredErrorLoss loss(target);

  auto eval = [&](const WorldGaussian& w) {
    const std::vector<WorldGaussian> v{w};
    return loss.value(render_gaussians(v, cam, BlendMode::standard(), {0, false}).image);
  };
  const std::vector<WorldGaussian> v{g};
  const auto out = render_gaussians(v, cam, BlendMode::standard());
  const auto grad = backward(out, loss.gradient(out.image), BlendMode::standard()).entries[0];
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    WorldGaussian p = g, m = g;
    p.position[k] += h;
    m.position[k] -= h;
    const double fd = (eval(p) - eval(m)) / (2 * h);
    EXPECT_NEAR(grad.position[k], fd, 1e-5 * std::max(1e-3, std::abs(fd)));
  }
  WorldGaussian p = g, m = g;
  p.opacity_logit += h;
  m.opacity_logit -= h;
  const double fd = (eval(p) - eval(m)) / (2 * h);
  EXPECT_NEAR(grad.opacity_logit, fd, 1e-5 * std::max(1e-3, std::abs(fd)));
}
