#include "generators.hpp"

#include "wabe/core/error.hpp"
#include "wabe/losses/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wabe;
using testsupport::Gen;

TEST(L1, ValueAndSymmetry) {
  Gen gen(51);
  const ImageBuffer a = gen.image(9, 7), b = gen.image(9, 7);
  const auto ab = l1_loss(a, b), ba = l1_loss(b, a);
  EXPECT_EQ(ab.value, ba.value);
  double expect = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) expect += std::abs(a.data()[i] - b.data()[i]);
  EXPECT_NEAR(ab.value, expect / a.size(), 1e-15);
  EXPECT_EQ(l1_loss(a, a).value, 0.0);
}

TEST(L1, UniformOffsetAndSubgradient) {
  const ImageBuffer a(4, 4, 0.25), b(4, 4, 0.75);
  const auto l = l1_loss(a, b);
  EXPECT_DOUBLE_EQ(l.value, 0.5);
  for (double g : l.gradient.data()) EXPECT_DOUBLE_EQ(g, -1.0 / 48.0);
  const auto tie = l1_loss(a, a);
  for (double g : tie.gradient.data()) EXPECT_EQ(g, 0.0);
  EXPECT_THROW(l1_loss(a, ImageBuffer(3, 4)), Error);
}

TEST(Ssim, IdenticalImagesScoreOne) {
  Gen gen(52);
  const ImageBuffer a = gen.image(24, 19);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  EXPECT_NEAR(dssim_loss(a, a).value, 0.0, 1e-12);
}

TEST(Ssim, ConstantImagesClosedForm) {
  // Constant x, y: variances vanish, so SSIM = (2xy + C1) / (x^2 + y^2 + C1).
  const double c1 = 1e-4;
  for (auto [x, y] : {std::pair{0.2, 0.7}, std::pair{0.5, 0.5}, std::pair{0.9, 0.1}}) {
    const double expect = (2 * x * y + c1) / (x * x + y * y + c1);
    EXPECT_NEAR(ssim(ImageBuffer(16, 16, x), ImageBuffer(16, 16, y)), expect, 1e-12);
  }
}

TEST(Ssim, Symmetric) {
  Gen gen(53);
  const ImageBuffer a = gen.image(20, 20), b = gen.image(20, 20);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-14);
}

TEST(Ssim, RejectsImagesSmallerThanWindow) {
  EXPECT_THROW(ssim(ImageBuffer(10, 20), ImageBuffer(10, 20)), Error);
  EXPECT_THROW(ssim(ImageBuffer(20, 20), ImageBuffer(20, 19)), Error);
}

TEST(Dssim, GradientMatchesFiniteDifferences) {
  Gen gen(54);
  const ImageBuffer a = gen.image(17, 14), b = gen.image(17, 14);
  const auto l = dssim_loss(a, b);
  const double h = 1e-6;
  for (int trial = 0; trial < 40; ++trial) {
    const int x = gen.integer(0, 16), y = gen.integer(0, 13), c = gen.integer(0, 2);
    ImageBuffer p = a, m = a;
    p.at(x, y, c) += h;
    m.at(x, y, c) -= h;
    const double fd = (dssim_loss(p, b).value - dssim_loss(m, b).value) / (2 * h);
    EXPECT_NEAR(l.gradient.at(x, y, c), fd, 1e-7 + 1e-5 * std::abs(fd));
  }
}

TEST(ConstLoss, ZeroInsideThresholds) {
  std::vector<Gaussian3D> gs(3);
  for (auto& g : gs) g.log_scale = Vec3::Constant(std::log(0.2));
  gs[0].position_local = Vec3(0.9, -0.9, 0.9);  // |p| > 1, but every |p_k| < 1
  gs[0].log_scale = Vec3::Constant(std::log(0.5));
  gs[1].position_local = Vec3(0.0, 0.99, 0.0);
  gs[1].log_scale = Vec3::Constant(std::log(0.59));
  const auto b = const_loss(gs);
  EXPECT_EQ(b.value, 0.0);
  for (double g : pack_gradients(b.gradient)) EXPECT_EQ(g, 0.0);
}

TEST(ConstLoss, HingeValueByHand) {
  std::vector<Gaussian3D> gs(2);
  gs[0].position_local = Vec3(2.0, 0.0, 0.0);  // excess 1 -> 1
  gs[0].log_scale = Vec3::Constant(std::log(0.5));
  gs[1].log_scale = Vec3(std::log(1.6), std::log(0.1), std::log(0.6));  // excess (1, 0, 0) -> 1
  const auto b = const_loss(gs);
  EXPECT_NEAR(b.position, 1.0 / 2.0, 1e-12);
  EXPECT_NEAR(b.scale, 1.0 / 2.0, 1e-12);
  EXPECT_NEAR(b.value, 1.0, 1e-12);
}

TEST(ConstLoss, GradientMatchesFiniteDifferences) {
  Gen gen(55);
  std::vector<Gaussian3D> gs(6);
  for (auto& g : gs) {
    g.position_local = gen.vec3(-2, 2);
    g.log_scale = gen.vec3(-2, 1);
  }
  const auto b = const_loss(gs);
  const double h = 1e-6;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      auto p = gs, m = gs;
      p[i].position_local[k] += h;
      m[i].position_local[k] -= h;
      EXPECT_NEAR(b.gradient.entries[i].position[k],
                  (const_loss(p).value - const_loss(m).value) / (2 * h), 1e-7);
      p = gs;
      m = gs;
      p[i].log_scale[k] += h;
      m[i].log_scale[k] -= h;
      EXPECT_NEAR(b.gradient.entries[i].log_scale[k],
                  (const_loss(p).value - const_loss(m).value) / (2 * h), 1e-7);
    }
  }
}

TEST(TotalLoss, WeightsAndRouting) {
  const LossWeights w;
  EXPECT_EQ(w.lambda1, 10.0);
  EXPECT_EQ(w.lambda2, 0.01);
  EXPECT_EQ(w.lambda3, 0.01);
  EXPECT_EQ(w.lambda4, 10.0);
  const auto t = total_loss(0.5, 1.2, 0.7, 0.1, w);
  EXPECT_NEAR(t.gaussian_side, 10 * 0.5 + 0.01 * 0.7 + 10 * 0.1, 1e-15);
  EXPECT_NEAR(t.discriminator_side, 0.01 * 1.2, 1e-15);
  EXPECT_NEAR(t.value, t.gaussian_side + t.discriminator_side, 1e-15);
}

TEST(TotalLoss, RejectsNegativeWeights) {
  LossWeights w;
  w.lambda3 = -1.0;
  EXPECT_THROW(w.validate(), Error);
}
