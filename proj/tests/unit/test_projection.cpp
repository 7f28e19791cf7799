#include "wabe/core/math.hpp"
#include "wabe/rasterizer/projection.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wabe;

namespace {

Camera pinhole(double f = 100.0) {
  Camera c;
  c.fx = f;
  c.fy = f;
  c.cx = 31.5;
  c.cy = 31.5;
  c.width = 64;
  c.height = 64;
  return c;
}

WorldGaussian axis_aligned(const Vec3& p, const Vec3& sigma, double opacity = 0.8) {
  WorldGaussian g;
  g.position = p;
  g.log_scale = sigma.array().log();
  g.opacity_logit = opacity_logit_from(opacity);
  return g;
}

}  // namespace

TEST(Projection, OnAxisCovarianceIsScaledPlusBlur) {
  // J = diag(f/z, f/z) on the optical axis: 100 / 2 = 50.
  const auto s = project(axis_aligned({0, 0, 2}, {0.1, 0.2, 0.3}), pinhole());
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->cov2d(0, 0), 2500 * 0.01 + 0.3, 1e-12);
  EXPECT_NEAR(s->cov2d(1, 1), 2500 * 0.04 + 0.3, 1e-12);
  EXPECT_NEAR(s->cov2d(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(s->mean2d.x(), 31.5, 1e-12);
  EXPECT_NEAR(s->mean2d.y(), 31.5, 1e-12);
  EXPECT_DOUBLE_EQ(s->depth, 2.0);
  EXPECT_NEAR(s->peak_opacity, 0.8, 1e-12);
}

TEST(Projection, OffAxisPicksUpDepthTerm) {
  // Row 0 of J is (50, 0, -100 * 0.4 / 4) = (50, 0, -10).
  const auto s = project(axis_aligned({0.4, 0, 2}, {0.1, 0.2, 0.3}), pinhole());
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->cov2d(0, 0), 2500 * 0.01 + 100 * 0.09 + 0.3, 1e-12);
  EXPECT_NEAR(s->cov2d(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(s->mean2d.x(), 31.5 + 20.0, 1e-12);
}

TEST(Projection, InverseCovarianceIsInverse) {
  WorldGaussian g = axis_aligned({0.2, -0.1, 3}, {0.1, 0.05, 0.2});
  g.rotation = normalized(Quat(0.9, 0.2, -0.3, 0.1));
  const auto s = project(g, pinhole());
  ASSERT_TRUE(s);
  EXPECT_LT((s->cov2d * s->inv_cov2d - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projection, CullsAtOrBehindNearPlane) {
  EXPECT_FALSE(project(axis_aligned({0, 0, 0.005}, {0.1, 0.1, 0.1}), pinhole()));
  EXPECT_FALSE(project(axis_aligned({0, 0, -1.0}, {0.1, 0.1, 0.1}), pinhole()));
  EXPECT_TRUE(project(axis_aligned({0, 0, 0.5}, {0.01, 0.01, 0.01}), pinhole()));
}

TEST(Projection, CullsNearlyTransparent) {
  EXPECT_FALSE(project(axis_aligned({0, 0, 2}, {0.1, 0.1, 0.1}, 1.0 / 255.0), pinhole()));
  EXPECT_TRUE(project(axis_aligned({0, 0, 2}, {0.1, 0.1, 0.1}, 1.5 / 255.0), pinhole()));
}

TEST(Projection, CullsDegenerateFootprint) {
  // Flattened along x and y, long only along the viewing ray.
  EXPECT_FALSE(project(axis_aligned({0, 0, 2}, {1e-9, 1e-9, 0.5}), pinhole()));
}

TEST(Projection, CullsFootprintOutsideViewport) {
  EXPECT_FALSE(project(axis_aligned({5, 0, 2}, {0.01, 0.01, 0.01}), pinhole()));
  // Centre off-screen, but wide enough to reach the left edge.
  EXPECT_TRUE(project(axis_aligned({0.7, 0, 2}, {0.1, 0.1, 0.01}), pinhole()));
}

TEST(Projection, ExtentMarksAlphaThreshold) {
  const auto s = project(axis_aligned({0, 0, 2}, {0.1, 0.2, 0.3}, 0.6), pinhole());
  ASSERT_TRUE(s);
  const double at_edge_x = alpha_at(*s, s->mean2d + Vec2(s->extent_x, 0.0));
  const double at_edge_y = alpha_at(*s, s->mean2d + Vec2(0.0, s->extent_y));
  EXPECT_NEAR(at_edge_x, kAlphaMin, 1e-12);
  EXPECT_NEAR(at_edge_y, kAlphaMin, 1e-12);
  EXPECT_LT(alpha_at(*s, s->mean2d + Vec2(s->extent_x * 1.01, 0.0)), kAlphaMin);
}

TEST(Projection, AlphaClampsAtMaximum) {
  const auto s = project(axis_aligned({0, 0, 2}, {0.1, 0.1, 0.1}, 0.999), pinhole());
  ASSERT_TRUE(s);
  EXPECT_EQ(alpha_at(*s, s->mean2d), kAlphaMax);
}

TEST(Projection, ProjectAllKeepsSourceIndices) {
  std::vector<WorldGaussian> gs{axis_aligned({0, 0, 2}, {0.1, 0.1, 0.1}),
                                axis_aligned({0, 0, -2}, {0.1, 0.1, 0.1}),
                                axis_aligned({0.1, 0, 3}, {0.1, 0.1, 0.1})};
  const auto splats = project_all(gs, pinhole());
  ASSERT_EQ(splats.size(), 2u);
  EXPECT_EQ(splats[0].source_index, 0);
  EXPECT_EQ(splats[1].source_index, 2);
}
